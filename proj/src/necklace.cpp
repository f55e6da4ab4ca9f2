// Necklace enumeration with forbidden transitions and relator-chain limits.
//
// Words are generated in lexicographic order by the Fredricksen-Kessler-Maiorana
// recursion, which only extends prenecklaces; a prefix of length t with
// period p is a necklace exactly when p divides t. Constraint pruning removes
// subtrees without disturbing the period bookkeeping, so every constrained
// necklace is still reached once.

#include <algorithm>
#include <stdexcept>

#include "geodesics/group_core.hpp"
#include "word_codes.hpp"

namespace geodesics {

namespace {

constexpr int kPrefixLength = 3;

}  // namespace

NecklaceEnumerator::NecklaceEnumerator(const SurfacePresentation& p, int n_max) : n_max_(n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  const int rank = p.generator_count();
  alphabet_ = 2 * rank;
  inverse_.resize(static_cast<std::size_t>(alphabet_));
  for (int c = 0; c < alphabet_; ++c) inverse_[c] = static_cast<std::uint8_t>((c + rank) % alphabet_);
  allowed_.assign(static_cast<std::size_t>(alphabet_ * alphabet_), 1);
  for (int c = 0; c < alphabet_; ++c) allowed_[static_cast<std::size_t>(c * alphabet_ + inverse_[c])] = 0;
  if (p.is_surface()) {
    const auto chains = detail::RelatorChains::from(p);
    surface_ = true;
    half_ = chains.half;
    relator_length_ = chains.length;
    succ_fwd_ = chains.succ_fwd;
    succ_bwd_ = chains.succ_bwd;
  }

  // Collect the admissible prefixes of the shard length.
  prefix_length_ = std::min(kPrefixLength, n_max_);
  std::vector<std::uint8_t> a(static_cast<std::size_t>(n_max_));
  std::function<void(int, int, int, int)> collect = [&](int t, int per, int rf, int rb) {
    if (t == prefix_length_) {
      prefixes_.emplace_back(a.begin(), a.begin() + t);
      return;
    }
    const int lower = t == 0 ? 0 : a[t - per];
    for (int c = lower; c < alphabet_; ++c) {
      if (t > 0 && !step_allowed(a[t - 1], static_cast<std::uint8_t>(c))) continue;
      int nf = 1, nb = 1;
      if (surface_ && t > 0) {
        if (succ_fwd_[a[t - 1]] == c) nf = rf + 1;
        if (succ_bwd_[a[t - 1]] == c) nb = rb + 1;
        if (nf > half_ || nb > half_) continue;
      }
      a[t] = static_cast<std::uint8_t>(c);
      collect(t + 1, (t == 0 || c != a[t - per]) ? t + 1 : per, nf, nb);
    }
  };
  collect(0, 1, 0, 0);
}

NecklaceEnumerator::NecklaceEnumerator(int k, std::vector<std::uint8_t> allowed, int n_max)
    : alphabet_(k), n_max_(n_max), allowed_(std::move(allowed)) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (k < 1 || k > 255 || allowed_.size() != static_cast<std::size_t>(k * k)) {
    throw std::invalid_argument("transition matrix must be k x k");
  }
  prefix_length_ = std::min(kPrefixLength, n_max_);
  std::vector<std::uint8_t> a(static_cast<std::size_t>(n_max_));
  std::function<void(int, int)> collect = [&](int t, int per) {
    if (t == prefix_length_) {
      prefixes_.emplace_back(a.begin(), a.begin() + t);
      return;
    }
    const int lower = t == 0 ? 0 : a[t - per];
    for (int c = lower; c < alphabet_; ++c) {
      if (t > 0 && !step_allowed(a[t - 1], static_cast<std::uint8_t>(c))) continue;
      a[t] = static_cast<std::uint8_t>(c);
      collect(t + 1, (t == 0 || c != a[t - per]) ? t + 1 : per);
    }
  };
  collect(0, 1);
}

void NecklaceEnumerator::run_shard(std::size_t shard,
                                   const std::function<void(const RawClass&)>& visit) const {
  if (shard >= shard_count()) throw std::out_of_range("shard index");
  std::vector<std::uint8_t> a(static_cast<std::size_t>(n_max_));
  if (shard == 0) {
    descend(a, 0, 1, 0, 0, prefix_length_ - 1, visit);
    return;
  }
  // Replay the prefix to recover the period and trailing chain runs.
  const auto& prefix = prefixes_[shard - 1];
  int per = 1, rf = 0, rb = 0;
  for (int t = 0; t < prefix_length_; ++t) {
    const std::uint8_t c = prefix[t];
    int nf = 1, nb = 1;
    if (surface_ && t > 0) {
      if (succ_fwd_[a[t - 1]] == c) nf = rf + 1;
      if (succ_bwd_[a[t - 1]] == c) nb = rb + 1;
    }
    if (t > 0 && c != a[t - per]) per = t + 1;
    a[t] = c;
    rf = nf;
    rb = nb;
  }
  descend(a, prefix_length_, per, rf, rb, n_max_, visit);
}

void NecklaceEnumerator::descend(std::vector<std::uint8_t>& a, int t, int per, int rf, int rb,
                                 int max_depth,
                                 const std::function<void(const RawClass&)>& visit) const {
  if (t >= 1) emit_if_class(a, t, per, visit);
  if (t >= max_depth) return;
  const int lower = t == 0 ? 0 : a[t - per];
  for (int c = lower; c < alphabet_; ++c) {
    if (t > 0 && !step_allowed(a[t - 1], static_cast<std::uint8_t>(c))) continue;
    int nf = 1, nb = 1;
    if (surface_ && t > 0) {
      if (succ_fwd_[a[t - 1]] == c) nf = rf + 1;
      if (succ_bwd_[a[t - 1]] == c) nb = rb + 1;
      if (nf > half_ || nb > half_) continue;
    }
    a[t] = static_cast<std::uint8_t>(c);
    descend(a, t + 1, (t == 0 || c != a[t - per]) ? t + 1 : per, nf, nb, max_depth, visit);
  }
}

void NecklaceEnumerator::emit_if_class(std::vector<std::uint8_t>& a, int t, int per,
                                       const std::function<void(const RawClass&)>& visit) const {
  if (t % per != 0) return;
  if (!step_allowed(a[t - 1], a[0])) return;
  if (surface_ && t > 1) {
    // Cyclic chain runs without allocating. Only words with a run of half a
    // relator, or built from runs of half - 1, admit chain moves.
    int longest = 0;
    for (int dir = 0; dir < 2; ++dir) {
      const auto& succ = dir == 0 ? succ_fwd_ : succ_bwd_;
      int first_break = -1;
      for (int i = 0; i < t; ++i) {
        if (succ[a[i]] != a[(i + 1) % t]) {
          first_break = i;
          break;
        }
      }
      if (first_break < 0) return;  // a power of a relator rotation
      int len = 1;
      for (int k = 0; k < t; ++k) {
        const int i = (first_break + 1 + k) % t;
        if (k + 1 < t && succ[a[i]] == a[(i + 1) % t]) {
          ++len;
        } else {
          if (len > half_) return;
          longest = std::max(longest, len);
          len = 1;
        }
      }
    }
    if (longest == half_ || (longest == half_ - 1 && t % (half_ - 1) == 0)) {
      std::vector<std::uint8_t> w(a.begin(), a.begin() + t);
      if (!orbit_canonical(w)) return;
    }
  }
  visit(RawClass{std::span<const std::uint8_t>(a.data(), static_cast<std::size_t>(t)), per});
}

bool NecklaceEnumerator::orbit_canonical(const std::vector<std::uint8_t>& w) const {
  detail::RelatorChains chains;
  chains.rank = alphabet_ / 2;
  chains.length = relator_length_;
  chains.half = half_;
  chains.succ_fwd = succ_fwd_;
  chains.succ_bwd = succ_bwd_;
  const auto orbit = detail::chain_orbit(w, chains);
  return orbit.shorter.empty() && orbit.least == w;
}

}  // namespace geodesics
