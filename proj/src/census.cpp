#include "geodesics/census.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "geodesics/error.hpp"
#include "parallel.hpp"
#include "word_codes.hpp"

namespace geodesics {

namespace {

constexpr char kStateSymbols[] = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
constexpr double kTraceErrorFlag = 1e-7;

std::string group_alphabet(int rank) {
  std::string s;
  for (int k = 0; k < 2 * rank; ++k) s += code_letter(static_cast<std::uint8_t>(k), rank).ascii();
  return s;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Per-shard output, bucketed by word length so that the merge can emit
// (n, lexicographic) order.
struct Row {
  double ell;
  double trace;
  std::uint16_t power;
  bool primitive;
};

struct ShardOut {
  std::vector<std::vector<Row>> rows;
  std::vector<std::vector<std::uint8_t>> codes;
  std::size_t flagged = 0;
  double max_error = 0.0;
};

class ProgressGuard {
 public:
  ProgressGuard(std::size_t budget, std::size_t per_record, double estimate)
      : budget_(budget), per_record_(per_record), estimate_(estimate) {}

  void add(std::size_t k) {
    const std::size_t total = count_.fetch_add(k) + k;
    if (total * per_record_ > budget_) {
      std::ostringstream msg;
      msg << "memory budget of " << budget_ / (1 << 20) << " MiB exhausted after " << total
          << " of about " << static_cast<long long>(estimate_) << " classes";
      throw MemoryBudgetExceeded(msg.str());
    }
  }

 private:
  std::atomic<std::size_t> count_{0};
  std::size_t budget_;
  std::size_t per_record_;
  double estimate_;
};

template <class ShardFn>
Census run_build(const NecklaceEnumerator& engine, Census census, const CensusOptions& opts,
                 double estimate, ShardFn&& shard_fn) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n_max = engine.n_max();
  const std::size_t per_record = census_bytes_per_record(n_max);
  if (estimate * static_cast<double>(per_record) > static_cast<double>(opts.memory_budget_bytes)) {
    std::ostringstream msg;
    msg << "estimated " << static_cast<long long>(estimate) << " classes need about "
        << static_cast<long long>(estimate * per_record / (1 << 20)) << " MiB, over the budget of "
        << opts.memory_budget_bytes / (1 << 20) << " MiB; 0 classes built";
    throw MemoryBudgetExceeded(msg.str());
  }
  ProgressGuard guard(opts.memory_budget_bytes, per_record, estimate);

  std::vector<ShardOut> shards(engine.shard_count());
  detail::parallel_for(shards.size(), opts.workers, [&](std::size_t s) {
    ShardOut& out = shards[s];
    out.rows.resize(static_cast<std::size_t>(n_max) + 1);
    out.codes.resize(static_cast<std::size_t>(n_max) + 1);
    std::size_t pending = 0;
    engine.run_shard(s, [&](const RawClass& rc) {
      const std::size_t n = rc.codes.size();
      out.rows[n].push_back(shard_fn(rc, out));
      out.codes[n].insert(out.codes[n].end(), rc.codes.begin(), rc.codes.end());
      if (++pending == 4096) {
        guard.add(pending);
        pending = 0;
      }
    });
    guard.add(pending);
  });

  std::size_t total = 0, total_letters = 0;
  for (const auto& sh : shards) {
    for (int n = 1; n <= n_max; ++n) {
      total += sh.rows[static_cast<std::size_t>(n)].size();
      total_letters += sh.codes[static_cast<std::size_t>(n)].size();
    }
    census.build_info().flagged_records += sh.flagged;
    census.build_info().max_trace_error = std::max(census.build_info().max_trace_error, sh.max_error);
  }
  if (total > std::numeric_limits<std::uint32_t>::max()) {
    throw MemoryBudgetExceeded("census exceeds 2^32 records");
  }
  census.reserve(total, total_letters);
  std::uint32_t id = 0;
  for (int n = 1; n <= n_max; ++n) {
    for (auto& sh : shards) {
      auto& rows = sh.rows[static_cast<std::size_t>(n)];
      auto& codes = sh.codes[static_cast<std::size_t>(n)];
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        census.add(std::span<const std::uint8_t>(codes.data() + i * n, static_cast<std::size_t>(n)),
                   id++, r.power, r.primitive, r.ell, r.trace);
      }
      std::vector<Row>().swap(rows);
      std::vector<std::uint8_t>().swap(codes);
    }
  }
  census.finalize();
  auto& info = census.build_info();
  info.created_utc = utc_now();
  info.workers = detail::resolve_workers(opts.workers);
  info.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return census;
}

std::string codes_text(std::span<const std::uint8_t> codes, const std::string& alphabet) {
  std::string s;
  s.reserve(codes.size());
  for (auto c : codes) s += alphabet[c];
  return s;
}

}  // namespace

Census::Census(std::string presentation, std::string representation, std::string alphabet, int n_max)
    : presentation_(std::move(presentation)),
      representation_(std::move(representation)),
      alphabet_(std::move(alphabet)),
      n_max_(n_max) {
  if (n_max < 1 || n_max > 64) throw std::invalid_argument("n_max must be in [1, 64]");
  if (alphabet_.empty() || alphabet_.size() > 62) throw std::invalid_argument("bad census alphabet");
}

bool Census::is_group() const {
  return presentation_.starts_with("surface:") || presentation_.starts_with("free:");
}

std::string Census::word(const GeodesicRecord& r) const { return codes_text(codes(r), alphabet_); }

CyclicWord Census::cyclic_word(const GeodesicRecord& r) const {
  if (!is_group()) throw std::logic_error("subshift census has no group words");
  return CyclicWord::parse(word(r));
}

std::vector<std::size_t> Census::count_by_n() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_max_) + 1, 0);
  for (const auto& r : records_) ++counts[r.n];
  return counts;
}

void Census::reserve(std::size_t records, std::size_t letters) {
  records_.reserve(records);
  letters_.reserve(letters);
}

void Census::add(std::span<const std::uint8_t> codes, std::uint32_t id, int power, bool primitive,
                 double ell, double trace) {
  if (codes.empty() || codes.size() > static_cast<std::size_t>(n_max_)) {
    throw std::invalid_argument("record word length outside [1, n_max]");
  }
  for (auto c : codes) {
    if (c >= alphabet_.size()) throw std::invalid_argument("record letter outside the alphabet");
  }
  GeodesicRecord r;
  r.ell = ell;
  r.trace = trace;
  r.word_offset = letters_.size();
  r.id = id;
  r.n = static_cast<std::uint16_t>(codes.size());
  r.power = static_cast<std::uint16_t>(power);
  r.primitive = primitive;
  letters_.insert(letters_.end(), codes.begin(), codes.end());
  records_.push_back(r);
}

void Census::finalize() {
  std::sort(records_.begin(), records_.end(), [](const GeodesicRecord& x, const GeodesicRecord& y) {
    if (x.ell != y.ell) return x.ell < y.ell;
    if (x.n != y.n) return x.n < y.n;
    return x.id < y.id;
  });
  cutoff_ = certify_cutoff(*this);
}

bool operator==(const Census& x, const Census& y) {
  if (x.presentation_ != y.presentation_ || x.representation_ != y.representation_ ||
      x.alphabet_ != y.alphabet_ || x.n_max_ != y.n_max_ || x.records_.size() != y.records_.size() ||
      x.cutoff_.T_cert != y.cutoff_.T_cert || x.cutoff_.alpha_hat != y.cutoff_.alpha_hat) {
    return false;
  }
  for (std::size_t i = 0; i < x.records_.size(); ++i) {
    const auto& a = x.records_[i];
    const auto& b = y.records_[i];
    if (a.id != b.id || a.n != b.n || a.ell != b.ell || a.trace != b.trace || a.power != b.power ||
        a.primitive != b.primitive) {
      return false;
    }
    const auto ca = x.codes(a), cb = y.codes(b);
    if (!std::equal(ca.begin(), ca.end(), cb.begin(), cb.end())) return false;
  }
  return true;
}

std::size_t census_bytes_per_record(int n_max) {
  // Shard buffers are released bucket by bucket while the census fills, so
  // the peak stays close to the final record array plus its letters.
  return sizeof(GeodesicRecord) + static_cast<std::size_t>(n_max) + 8;
}

Census build_census(const SurfacePresentation& p, const FuchsianRep& rep, int n_max,
                    const CensusOptions& opts) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (!(rep.presentation() == p)) throw std::invalid_argument("representation is for another presentation");
  const RepresentationReport check = verify_representation(rep, std::min(n_max, 4));
  if (!check.pass) {
    std::ostringstream msg;
    msg << "representation " << rep.name() << " failed verification: relator deviation "
        << check.relator_deviation << ", generators hyperbolic " << check.generators_hyperbolic
        << ", classes hyperbolic " << check.classes_hyperbolic << ", rotation trace error "
        << check.max_rotation_trace_error;
    throw NonHyperbolicError(msg.str());
  }
  const int rank = p.generator_count();
  const NecklaceEnumerator engine(p, n_max);
  Census census(p.describe(), rep.name(), group_alphabet(rank), n_max);
  const double tol = rep.tolerance();

  auto evaluate = [&](const RawClass& rc, ShardOut& out) -> Row {
    const int n = static_cast<int>(rc.codes.size());
    const auto root = rc.codes.first(static_cast<std::size_t>(rc.period));
    const MoebiusMatrix fwd = evaluate_codes(rep, root);
    const double tr_root = fwd.trace();
    const double err = std::abs(tr_root - evaluate_codes_reverse(rep, root).trace()) /
                       std::max(1.0, std::abs(tr_root));
    if (err > kTraceErrorFlag) ++out.flagged;
    out.max_error = std::max(out.max_error, err);
    double ell_root = 0.0;
    try {
      ell_root = translation_length(fwd, tol);
    } catch (const NonHyperbolicError& e) {
      throw NonHyperbolicError("class " + codes_text(rc.codes, census.alphabet()) + ": " + e.what());
    }
    const int power = n / rc.period;
    if (power == 1) return Row{ell_root, tr_root, 1, true};
    const double ell = power * ell_root;
    const double sign = (tr_root < 0.0 && power % 2 == 1) ? -1.0 : 1.0;
    return Row{ell, sign * 2.0 * std::cosh(ell / 2.0), static_cast<std::uint16_t>(power), false};
  };
  return run_build(engine, std::move(census), opts, estimate_class_count(p, n_max), evaluate);
}

Census build_census_from_system(const MarkovChainSystem& sys, int n_max, const CensusOptions& opts) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  const int k = sys.k();
  const NecklaceEnumerator engine(k, sys.transition(), n_max);
  Census census(sys.describe(), sys.describe_roof(), std::string(kStateSymbols, static_cast<std::size_t>(k)),
                n_max);
  const auto& roof = sys.roof();
  auto evaluate = [&](const RawClass& rc, ShardOut&) -> Row {
    double root = 0.0;
    for (int i = 0; i < rc.period; ++i) root += roof[rc.codes[static_cast<std::size_t>(i)]];
    const int power = static_cast<int>(rc.codes.size()) / rc.period;
    const double ell = power * root;
    return Row{ell, 2.0 * std::cosh(ell / 2.0), static_cast<std::uint16_t>(power), power == 1};
  };
  double estimate = 0.0;
  for (int n = 1; n <= n_max; ++n) estimate += (std::pow(static_cast<double>(k), n) + k) / n;
  return run_build(engine, std::move(census), opts, estimate, evaluate);
}

CutoffReport certify_cutoff(const Census& c) {
  CutoffReport rep;
  const int n_max = c.n_max();
  rep.min_ell.assign(static_cast<std::size_t>(n_max) + 1, std::numeric_limits<double>::infinity());
  rep.min_ell[0] = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : c.records()) rep.min_ell[r.n] = std::min(rep.min_ell[r.n], r.ell);
  rep.alpha_hat = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    const double m = rep.min_ell[static_cast<std::size_t>(n)];
    if (std::isfinite(m)) rep.alpha_hat = std::min(rep.alpha_hat, m / n);
  }
  rep.T_cert = std::isfinite(rep.alpha_hat) ? rep.alpha_hat * (n_max + 1) : 0.0;
  if (!std::isfinite(rep.alpha_hat)) rep.alpha_hat = 0.0;
  return rep;
}

namespace {

bool is_rotation(std::span<const std::uint8_t> u, std::span<const std::uint8_t> v) {
  if (u.size() != v.size()) return false;
  const std::size_t n = u.size();
  for (std::size_t k = 0; k < n; ++k) {
    bool same = true;
    for (std::size_t i = 0; i < n && same; ++i) same = u[(i + k) % n] == v[i];
    if (same) return true;
  }
  return false;
}

// Reduced words of length <= bound, shortest first.
std::vector<detail::Codes> conjugators(int rank, int bound) {
  std::vector<detail::Codes> out{{}};
  std::size_t begin = 0;
  for (int len = 1; len <= bound; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (int c = 0; c < 2 * rank; ++c) {
        const auto x = static_cast<std::uint8_t>(c);
        if (!out[i].empty() && out[i].back() == static_cast<std::uint8_t>((x + rank) % (2 * rank))) continue;
        detail::Codes w = out[i];
        w.push_back(x);
        out.push_back(std::move(w));
      }
    }
    begin = end;
  }
  return out;
}

detail::Codes inverse_codes(const detail::Codes& w, int rank) {
  detail::Codes out(w.rbegin(), w.rend());
  for (auto& c : out) c = static_cast<std::uint8_t>((c + rank) % (2 * rank));
  return out;
}

}  // namespace

DedupeResult dedupe_classes(const Census& c, int conjugator_bound) {
  if (conjugator_bound < 0) throw std::invalid_argument("conjugator bound must be >= 0");
  DedupeAudit audit;
  std::optional<SurfacePresentation> pres;
  std::optional<detail::RelatorChains> chains;
  std::vector<detail::Codes> conj;
  int rank = 0;
  if (c.is_group()) {
    pres = SurfacePresentation::from_description(c.presentation());
    rank = pres->generator_count();
    if (pres->is_surface()) chains = detail::RelatorChains::from(*pres);
    conj = conjugators(rank, conjugator_bound);
  }
  auto trivial = [&](const detail::Codes& w) {
    const detail::Codes reduced = detail::free_reduce_codes(w, rank);
    if (!chains) return reduced.empty();
    return detail::dehn_reduce_linear_codes(reduced, *chains).empty();
  };
  auto conjugate = [&](std::span<const std::uint8_t> u, std::span<const std::uint8_t> v) {
    if (is_rotation(u, v)) return true;
    if (!c.is_group()) return false;
    const detail::Codes v_inv = inverse_codes(detail::Codes(v.begin(), v.end()), rank);
    for (const auto& g : conj) {
      if (g.empty()) continue;
      detail::Codes w = g;
      w.insert(w.end(), u.begin(), u.end());
      const detail::Codes g_inv = inverse_codes(g, rank);
      w.insert(w.end(), g_inv.begin(), g_inv.end());
      w.insert(w.end(), v_inv.begin(), v_inv.end());
      if (trivial(w)) return true;
    }
    return false;
  };

  // Bucket indices by (n, rounded ell).
  std::map<std::pair<int, long long>, std::vector<std::size_t>> buckets;
  const auto& recs = c.records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    buckets[{recs[i].n, std::llround(recs[i].ell * 1e6)}].push_back(i);
  }
  std::vector<bool> removed(recs.size(), false);
  for (auto& [key, idx] : buckets) {
    if (idx.size() < 2) continue;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return recs[a].id < recs[b].id; });
    for (std::size_t a = 0; a < idx.size(); ++a) {
      if (removed[idx[a]]) continue;
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        if (removed[idx[b]]) continue;
        const auto& x = recs[idx[a]];
        const auto& y = recs[idx[b]];
        const double scale = std::max(1.0, std::abs(x.trace));
        if (std::abs(x.trace - y.trace) >= 1e-9 * scale) continue;
        const auto u = c.codes(x), v = c.codes(y);
        ++audit.pairs_tested;
        if (std::equal(u.begin(), u.end(), v.begin(), v.end()) || conjugate(u, v)) {
          removed[idx[b]] = true;
          audit.merged.emplace_back(x.id, y.id);
        } else {
          audit.unresolved.emplace_back(x.id, y.id);
        }
      }
    }
  }
  std::sort(audit.merged.begin(), audit.merged.end());
  std::sort(audit.unresolved.begin(), audit.unresolved.end());

  Census out(c.presentation(), c.representation(), c.alphabet(), c.n_max());
  out.build_info() = c.build_info();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (removed[i]) continue;
    const auto& r = recs[i];
    out.add(c.codes(r), r.id, r.power, r.primitive, r.ell, r.trace);
  }
  out.finalize();
  return DedupeResult{std::move(out), std::move(audit)};
}

}  // namespace geodesics
