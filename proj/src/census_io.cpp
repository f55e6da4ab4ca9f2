#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include "geodesics/census.hpp"
#include "geodesics/error.hpp"

namespace geodesics {

namespace {

constexpr char kColumns[] = "id,n,ell,prime,power,trace,word";

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

char* put_real(char* p, char* end, double x) {
  return std::to_chars(p, end, x, std::chars_format::scientific, 16).ptr;
}

char* put_uint(char* p, char* end, unsigned x) { return std::to_chars(p, end, x).ptr; }

void append_line(std::string& out, const Census& c, const GeodesicRecord& r) {
  char buf[160];
  char* const end = buf + sizeof buf;
  char* p = put_uint(buf, end, r.id);
  *p++ = ',';
  p = put_uint(p, end, r.n);
  *p++ = ',';
  p = put_real(p, end, r.ell);
  *p++ = ',';
  *p++ = r.primitive ? '1' : '0';
  *p++ = ',';
  p = put_uint(p, end, r.power);
  *p++ = ',';
  p = put_real(p, end, r.trace);
  *p++ = ',';
  out.append(buf, p);
  for (auto code : c.codes(r)) out += c.alphabet()[code];
  out += '\n';
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_real(std::string_view s, double& out) {
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t census_checksum(const Census& c) {
  std::uint64_t checksum = 0xcbf29ce484222325ULL;
  std::string chunk;
  for (const auto& r : c.records()) {
    append_line(chunk, c, r);
    if (chunk.size() > (1 << 20)) {
      checksum = fnv1a64(chunk, checksum);
      chunk.clear();
    }
  }
  return fnv1a64(chunk, checksum);
}

std::uint64_t save_census(const Census& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << "# format_version=" << kCensusFormatVersion << '\n'
      << "# presentation=" << c.presentation() << '\n'
      << "# representation=" << c.representation() << '\n'
      << "# alphabet=" << c.alphabet() << '\n'
      << "# n_max=" << c.n_max() << '\n'
      << "# alpha_hat=" << format_real(c.alpha_hat()) << '\n'
      << "# T_cert=" << format_real(c.T_cert()) << '\n'
      << "# counting=directed\n"
      << "# record_count=" << c.size() << '\n'
      << "# checksum=";
  // Placeholder, patched once the data lines have been hashed.
  const auto checksum_at = out.tellp();
  out << "0000000000000000\n" << kColumns << '\n';

  std::uint64_t checksum = 0xcbf29ce484222325ULL;
  std::string chunk;
  for (const auto& r : c.records()) {
    append_line(chunk, c, r);
    if (chunk.size() > (1 << 20)) {
      checksum = fnv1a64(chunk, checksum);
      out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
      chunk.clear();
    }
  }
  checksum = fnv1a64(chunk, checksum);
  out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));

  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(checksum));
  out.seekp(checksum_at);
  out.write(hex, 16);
  out.flush();
  if (!out) throw IoError("write failed for " + path);
  return checksum;
}

Census load_census(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::map<std::string, std::string> header;
  std::string line;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (line.starts_with("# ")) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw FormatError("malformed header line: " + line);
      const std::string key = line.substr(2, eq - 2);
      header[key] = line.substr(eq + 1);
      if (key == "format_version" && header[key] != std::to_string(kCensusFormatVersion)) {
        throw VersionError("unsupported census format_version=" + header[key] + " (expected " +
                           std::to_string(kCensusFormatVersion) + ")");
      }
      continue;
    }
    if (line != kColumns) throw FormatError("expected column header `" + std::string(kColumns) + "`");
    have_columns = true;
    break;
  }
  if (!header.count("format_version")) throw VersionError("census header has no format_version");
  if (!have_columns) throw ChecksumError("census file ends before the data section");
  for (const char* key : {"presentation", "representation", "alphabet", "n_max", "alpha_hat", "T_cert",
                          "record_count", "checksum"}) {
    if (!header.count(key)) throw FormatError(std::string("census header lacks ") + key);
  }
  int n_max = 0;
  std::size_t expected_count = 0;
  std::uint64_t expected_sum = 0;
  double alpha_hat = 0.0, t_cert = 0.0;
  if (!parse_int(header["n_max"], n_max) || !parse_int(header["record_count"], expected_count) ||
      !parse_real(header["alpha_hat"], alpha_hat) || !parse_real(header["T_cert"], t_cert)) {
    throw FormatError("unparsable census header value");
  }
  {
    const auto& s = header["checksum"];
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), expected_sum, 16);
    if (ec != std::errc() || p != s.data() + s.size()) throw FormatError("unparsable checksum");
  }

  Census c(header["presentation"], header["representation"], header["alphabet"], n_max);
  std::array<int, 256> code_of;
  code_of.fill(-1);
  for (std::size_t i = 0; i < c.alphabet().size(); ++i) {
    code_of[static_cast<unsigned char>(c.alphabet()[i])] = static_cast<int>(i);
  }
  c.reserve(expected_count, expected_count * static_cast<std::size_t>(n_max));

  std::uint64_t sum = 0xcbf29ce484222325ULL;
  std::size_t count = 0;
  std::optional<std::string> parse_error;
  std::vector<std::uint8_t> codes;
  while (std::getline(in, line)) {
    const bool had_newline = !in.eof();
    sum = fnv1a64(line, sum);
    if (had_newline) sum = fnv1a64("\n", sum);
    ++count;
    if (parse_error) continue;
    std::string_view rest(line);
    std::string_view f[7];
    int k = 0;
    for (; k < 6; ++k) {
      const auto comma = rest.find(',');
      if (comma == std::string_view::npos) break;
      f[k] = rest.substr(0, comma);
      rest.remove_prefix(comma + 1);
    }
    f[6] = rest;
    std::uint32_t id = 0;
    unsigned n = 0, power = 0, prime = 0;
    double ell = 0.0, trace = 0.0;
    if (k != 6 || !parse_int(f[0], id) || !parse_int(f[1], n) || !parse_real(f[2], ell) ||
        !parse_int(f[3], prime) || !parse_int(f[4], power) || !parse_real(f[5], trace) ||
        f[6].size() != n || prime > 1) {
      parse_error = "malformed record at data line " + std::to_string(count);
      continue;
    }
    codes.clear();
    for (char ch : f[6]) {
      const int code = code_of[static_cast<unsigned char>(ch)];
      if (code < 0) {
        parse_error = "unknown letter in record at data line " + std::to_string(count);
        break;
      }
      codes.push_back(static_cast<std::uint8_t>(code));
    }
    if (parse_error) continue;
    try {
      c.add(codes, id, static_cast<int>(power), prime == 1, ell, trace);
    } catch (const std::invalid_argument& e) {
      parse_error = std::string(e.what()) + " at data line " + std::to_string(count);
    }
  }
  if (sum != expected_sum || count != expected_count) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "checksum %016llx over %zu records, header says %016llx over %zu",
                  static_cast<unsigned long long>(sum), count,
                  static_cast<unsigned long long>(expected_sum), expected_count);
    throw ChecksumError(std::string(buf) + " in " + path);
  }
  if (parse_error) throw FormatError(*parse_error);
  c.finalize();
  if (c.T_cert() != t_cert || c.alpha_hat() != alpha_hat) {
    throw FormatError("stored T_cert/alpha_hat disagree with the records");
  }
  c.build_info().checksum = sum;
  return c;
}

}  // namespace geodesics
