#include "geodesics/group_core.hpp"

#include <cmath>
#include <stdexcept>

#include "geodesics/error.hpp"
#include "word_codes.hpp"

namespace geodesics {

using detail::Codes;

char Letter::ascii() const noexcept {
  return static_cast<char>((inverted ? 'A' : 'a') + generator);
}

Letter Letter::from_ascii(char c) {
  if (c >= 'a' && c <= 'z') return {static_cast<std::uint8_t>(c - 'a'), false};
  if (c >= 'A' && c <= 'Z') return {static_cast<std::uint8_t>(c - 'A'), true};
  throw std::invalid_argument(std::string("not a letter: '") + c + "'");
}

std::uint8_t letter_code(Letter x, int rank) noexcept {
  return static_cast<std::uint8_t>(x.inverted ? rank + x.generator : x.generator);
}

Letter code_letter(std::uint8_t code, int rank) noexcept {
  if (code >= rank) return {static_cast<std::uint8_t>(code - rank), true};
  return {code, false};
}

namespace {

Letters parse_letters(std::string_view ascii) {
  Letters out;
  out.reserve(ascii.size());
  for (char c : ascii) out.push_back(Letter::from_ascii(c));
  return out;
}

std::string render(const Letters& letters) {
  std::string s;
  s.reserve(letters.size());
  for (Letter x : letters) s.push_back(x.ascii());
  return s;
}

}  // namespace

// --- Word -------------------------------------------------------------------

Word::Word(std::span<const Letter> letters) {
  letters_.reserve(letters.size());
  for (Letter x : letters) {
    if (!letters_.empty() && letters_.back() == x.inverse()) {
      letters_.pop_back();
    } else {
      letters_.push_back(x);
    }
  }
}

Word Word::parse(std::string_view ascii) { return Word(parse_letters(ascii)); }

Word Word::inverse() const {
  Letters inv(letters_.rbegin(), letters_.rend());
  for (auto& x : inv) x = x.inverse();
  return Word(inv);
}

std::string Word::str() const { return render(letters_); }

Word operator*(const Word& lhs, const Word& rhs) {
  Letters all = lhs.letters_;
  all.insert(all.end(), rhs.letters_.begin(), rhs.letters_.end());
  return Word(all);
}

// --- CyclicWord -------------------------------------------------------------

CyclicWord::CyclicWord(Letters letters) : letters_(std::move(letters)) {
  if (letters_.empty()) throw std::invalid_argument("cyclic word must be nonempty");
  const std::size_t t = letters_.size();
  if (t > 1) {
    for (std::size_t i = 0; i < t; ++i) {
      if (letters_[(i + 1) % t] == letters_[i].inverse()) {
        throw std::invalid_argument("cyclic word is not cyclically reduced: " + render(letters_));
      }
    }
  }
}

CyclicWord CyclicWord::parse(std::string_view ascii) { return CyclicWord(parse_letters(ascii)); }

CyclicWord CyclicWord::rotated(std::size_t k) const {
  Letters r = letters_;
  std::rotate(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(k % r.size()), r.end());
  return CyclicWord(std::move(r));
}

CyclicWord CyclicWord::inverse() const {
  Letters inv(letters_.rbegin(), letters_.rend());
  for (auto& x : inv) x = x.inverse();
  return CyclicWord(std::move(inv));
}

std::string CyclicWord::str() const { return render(letters_); }

CyclicWord mark_canonical(CyclicWord w) {
  w.canonical_ = true;
  return w;
}

// --- SurfacePresentation ----------------------------------------------------

SurfacePresentation SurfacePresentation::surface(int genus) {
  if (genus < 2 || genus > 6) throw std::invalid_argument("surface genus must be in [2, 6]");
  SurfacePresentation p;
  p.genus_ = genus;
  Letters r;
  for (int i = 0; i < 2 * genus; ++i) r.push_back({static_cast<std::uint8_t>(i), false});
  for (int i = 0; i < 2 * genus; ++i) r.push_back({static_cast<std::uint8_t>(i), true});
  p.relator_ = CyclicWord(std::move(r));
  return p;
}

SurfacePresentation SurfacePresentation::free_group(int rank) {
  if (rank < 2 || rank > 12) throw std::invalid_argument("free rank must be in [2, 12]");
  SurfacePresentation p;
  p.free_rank_ = rank;
  return p;
}

std::string SurfacePresentation::describe() const {
  if (is_surface()) {
    return "surface:genus=" + std::to_string(genus_) + ":relator=" + relator_->str();
  }
  return "free:rank=" + std::to_string(free_rank_);
}

SurfacePresentation SurfacePresentation::from_description(std::string_view text) {
  auto number_after = [&](std::string_view key) {
    const auto pos = text.find(key);
    if (pos == std::string_view::npos) throw std::invalid_argument("bad presentation: " + std::string(text));
    return std::stoi(std::string(text.substr(pos + key.size())));
  };
  if (text.starts_with("surface:")) return surface(number_after("genus="));
  if (text.starts_with("free:")) return free_group(number_after("rank="));
  throw std::invalid_argument("bad presentation: " + std::string(text));
}

void SurfacePresentation::validate(std::span<const Letter> letters) const {
  for (Letter x : letters) {
    if (x.generator >= generator_count()) {
      throw std::invalid_argument(std::string("letter '") + x.ascii() + "' not in presentation " +
                                  describe());
    }
  }
}

// --- reductions ---------------------------------------------------------------

Word free_reduce(std::span<const Letter> letters) { return Word(letters); }

std::optional<CyclicWord> cyclic_reduce(const Word& w) {
  const Letters& l = w.letters();
  std::size_t lo = 0, hi = l.size();
  while (hi - lo >= 2 && l[lo] == l[hi - 1].inverse()) {
    ++lo;
    --hi;
  }
  if (lo == hi) return std::nullopt;
  return CyclicWord(Letters(l.begin() + static_cast<std::ptrdiff_t>(lo),
                            l.begin() + static_cast<std::ptrdiff_t>(hi)));
}

std::optional<CyclicWord> dehn_reduce_cyclic(const CyclicWord& cw, const SurfacePresentation& p) {
  p.validate(cw.letters());
  if (!p.is_surface()) return cw;
  const auto chains = detail::RelatorChains::from(p);
  Codes r = detail::dehn_reduce_cyclic_codes(detail::to_codes(cw.letters(), chains.rank), chains);
  if (r.empty()) return std::nullopt;
  return CyclicWord(detail::to_letters(r, chains.rank));
}

Word dehn_reduce(const Word& w, const SurfacePresentation& p) {
  p.validate(w.letters());
  if (!p.is_surface()) return w;
  const auto chains = detail::RelatorChains::from(p);
  Codes r = detail::dehn_reduce_linear_codes(detail::to_codes(w.letters(), chains.rank), chains);
  return Word(detail::to_letters(r, chains.rank));
}

CyclicWord canonical_form(const CyclicWord& cw, const SurfacePresentation& p) {
  p.validate(cw.letters());
  const int rank = p.generator_count();
  Codes w = detail::to_codes(cw.letters(), rank);
  if (!p.is_surface()) {
    return mark_canonical(CyclicWord(detail::to_letters(detail::min_rotation(w), rank)));
  }
  const auto chains = detail::RelatorChains::from(p);
  for (;;) {
    w = detail::geodesic_reduce_cyclic_codes(std::move(w), chains);
    if (w.empty()) throw std::invalid_argument("canonical_form: word represents the identity");
    auto orbit = detail::chain_orbit(w, chains);
    if (orbit.shorter.empty()) return mark_canonical(CyclicWord(detail::to_letters(orbit.least, rank)));
    w = std::move(orbit.shorter);
  }
}

CyclicWord geodesic_reduce_cyclic(const CyclicWord& cw, const SurfacePresentation& p) {
  p.validate(cw.letters());
  if (!p.is_surface()) return cw;
  const auto chains = detail::RelatorChains::from(p);
  Codes w = detail::to_codes(cw.letters(), chains.rank);
  for (;;) {
    w = detail::geodesic_reduce_cyclic_codes(std::move(w), chains);
    if (w.empty()) throw std::invalid_argument("geodesic_reduce_cyclic: word represents the identity");
    auto orbit = detail::chain_orbit(w, chains);
    if (orbit.shorter.empty()) return CyclicWord(detail::to_letters(w, chains.rank));
    w = std::move(orbit.shorter);
  }
}

PrimitiveDecomposition is_primitive(const CyclicWord& cw) {
  const Letters& l = cw.letters();
  const std::size_t n = l.size();
  // Failure function; the least period of l is n - fail[n].
  std::vector<std::size_t> fail(n + 1, 0);
  for (std::size_t i = 1, k = 0; i < n; ++i) {
    while (k > 0 && l[i] != l[k]) k = fail[k];
    if (l[i] == l[k]) ++k;
    fail[i + 1] = k;
  }
  std::size_t period = n - fail[n];
  if (n % period != 0) period = n;
  PrimitiveDecomposition d{true, cw, 1};
  if (period < n) {
    d.primitive = false;
    d.power = static_cast<int>(n / period);
    d.root = CyclicWord(Letters(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(period)));
  }
  return d;
}

}  // namespace geodesics
