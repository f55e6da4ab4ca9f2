#include "word_codes.hpp"

#include <set>
#include <stdexcept>

namespace geodesics::detail {

RelatorChains RelatorChains::from(const SurfacePresentation& p) {
  RelatorChains rc;
  rc.rank = p.generator_count();
  if (!p.is_surface()) return rc;
  const Codes r = to_codes(p.relator()->letters(), rc.rank);
  rc.length = static_cast<int>(r.size());
  rc.half = rc.length / 2;
  const std::size_t alphabet = static_cast<std::size_t>(2 * rc.rank);
  rc.succ_fwd.assign(alphabet, 0xff);
  rc.succ_bwd.assign(alphabet, 0xff);
  for (int i = 0; i < rc.length; ++i) {
    rc.succ_fwd[r[i]] = r[(i + 1) % rc.length];
  }
  // R^-1 read left to right is inverse(r[L-1]), inverse(r[L-2]), ...
  for (int i = 0; i < rc.length; ++i) {
    const std::uint8_t here = rc.inverse(r[rc.length - 1 - i]);
    const std::uint8_t next = rc.inverse(r[(2 * rc.length - 2 - i) % rc.length]);
    rc.succ_bwd[here] = next;
  }
  return rc;
}

std::vector<Run> RelatorChains::cyclic_runs(const Codes& w, bool& full) const {
  full = false;
  std::vector<Run> runs;
  const int t = static_cast<int>(w.size());
  if (length == 0 || t == 0) return runs;
  for (bool forward : {true, false}) {
    const auto& s = succ(forward);
    int breaks = 0;
    int first_break = -1;
    for (int i = 0; i < t; ++i) {
      if (s[w[i]] != w[(i + 1) % t]) {
        ++breaks;
        if (first_break < 0) first_break = i;
      }
    }
    if (breaks == 0) {
      full = true;
      continue;
    }
    // Walk once around starting just after a break.
    int start = (first_break + 1) % t;
    int len = 1;
    for (int k = 0; k < t; ++k) {
      const int i = (first_break + 1 + k) % t;
      if (s[w[i]] == w[(i + 1) % t] && k + 1 < t) {
        ++len;
      } else {
        runs.push_back({start, len, forward});
        start = (i + 1) % t;
        len = 1;
      }
    }
  }
  return runs;
}

std::vector<Run> RelatorChains::linear_runs(const Codes& w) const {
  std::vector<Run> runs;
  const int t = static_cast<int>(w.size());
  if (length == 0 || t == 0) return runs;
  for (bool forward : {true, false}) {
    const auto& s = succ(forward);
    int start = 0;
    for (int i = 0; i < t; ++i) {
      if (i + 1 == t || s[w[i]] != w[i + 1]) {
        runs.push_back({start, i - start + 1, forward});
        start = i + 1;
      }
    }
  }
  return runs;
}

Codes RelatorChains::complement_inverse(std::uint8_t first, int m, bool forward) const {
  const auto& s = succ(forward);
  std::uint8_t x = first;
  for (int i = 0; i < m; ++i) x = s[x];
  Codes piece;
  piece.reserve(static_cast<std::size_t>(length - m));
  for (int i = m; i < length; ++i) {
    piece.push_back(x);
    x = s[x];
  }
  Codes out(piece.rbegin(), piece.rend());
  for (auto& c : out) c = inverse(c);
  return out;
}

Codes to_codes(std::span<const Letter> letters, int rank) {
  Codes out;
  out.reserve(letters.size());
  for (Letter x : letters) out.push_back(letter_code(x, rank));
  return out;
}

Letters to_letters(const Codes& codes, int rank) {
  Letters out;
  out.reserve(codes.size());
  for (auto c : codes) out.push_back(code_letter(c, rank));
  return out;
}

Codes free_reduce_codes(const Codes& w, int rank) {
  Codes stack;
  stack.reserve(w.size());
  for (auto c : w) {
    if (!stack.empty() && (stack.back() + rank) % (2 * rank) == c) {
      stack.pop_back();
    } else {
      stack.push_back(c);
    }
  }
  return stack;
}

Codes cyclic_reduce_codes(const Codes& w, int rank) {
  Codes r = free_reduce_codes(w, rank);
  std::size_t lo = 0, hi = r.size();
  while (hi - lo >= 2 && (r[lo] + rank) % (2 * rank) == r[hi - 1]) {
    ++lo;
    --hi;
  }
  return Codes(r.begin() + static_cast<std::ptrdiff_t>(lo), r.begin() + static_cast<std::ptrdiff_t>(hi));
}

bool is_cyclically_reduced(const Codes& w, int rank) {
  const std::size_t t = w.size();
  for (std::size_t i = 0; i < t; ++i) {
    if ((w[i] + rank) % (2 * rank) == w[(i + 1) % t] && t > 1) return false;
  }
  return true;
}

Codes min_rotation(const Codes& w) {
  Codes best = w;
  Codes rot = w;
  for (std::size_t k = 1; k < w.size(); ++k) {
    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    if (rot < best) best = rot;
  }
  return best;
}

namespace {

const Run* longest_run(const std::vector<Run>& runs) {
  const Run* best = nullptr;
  for (const auto& r : runs) {
    if (!best || r.length > best->length) best = &r;
  }
  return best;
}

}  // namespace

Codes dehn_reduce_cyclic_codes(Codes w, const RelatorChains& chains) {
  w = cyclic_reduce_codes(w, chains.rank);
  if (chains.length == 0) return w;
  for (;;) {
    if (w.empty()) return w;
    bool full = false;
    const auto runs = chains.cyclic_runs(w, full);
    if (full) return {};
    const Run* r = longest_run(runs);
    if (!r || r->length <= chains.half) return w;
    const int m = std::min(r->length, chains.length);
    const int t = static_cast<int>(w.size());
    Codes next = chains.complement_inverse(w[r->start], m, r->forward);
    for (int k = m; k < t; ++k) next.push_back(w[(r->start + k) % t]);
    w = cyclic_reduce_codes(next, chains.rank);
  }
}

Codes dehn_reduce_linear_codes(Codes w, const RelatorChains& chains) {
  w = free_reduce_codes(w, chains.rank);
  if (chains.length == 0) return w;
  for (;;) {
    if (w.empty()) return w;
    const auto runs = chains.linear_runs(w);
    const Run* r = longest_run(runs);
    if (!r || r->length <= chains.half) return w;
    const int m = std::min(r->length, chains.length);
    Codes next(w.begin(), w.begin() + r->start);
    const Codes rep = chains.complement_inverse(w[r->start], m, r->forward);
    next.insert(next.end(), rep.begin(), rep.end());
    next.insert(next.end(), w.begin() + r->start + m, w.end());
    w = free_reduce_codes(next, chains.rank);
  }
}

int longest_cyclic_run(const Codes& w, const RelatorChains& chains) {
  bool full = false;
  const auto runs = chains.cyclic_runs(w, full);
  if (full) return static_cast<int>(w.size());
  const Run* r = longest_run(runs);
  return r ? r->length : 0;
}

namespace {

class ChainSearch {
 public:
  ChainSearch(const Codes& w, const RelatorChains& chains, const std::function<void(Codes&&)>& out)
      : w_(w), c_(chains), out_(out), n_(static_cast<int>(w.size())), len_(chains.length) {}

  void run() {
    const int alphabet = 2 * c_.rank;
    std::vector<std::uint8_t> pred_fwd(static_cast<std::size_t>(alphabet)), pred_bwd(pred_fwd.size());
    for (int x = 0; x < alphabet; ++x) {
      pred_fwd[c_.succ_fwd[x]] = static_cast<std::uint8_t>(x);
      pred_bwd[c_.succ_bwd[x]] = static_cast<std::uint8_t>(x);
    }
    for (int i = 0; i < n_; ++i) {
      start_ = i;
      closing_.reset();
      cell(0, w_[i], 0, 0);
      for (const auto* pred : {&pred_fwd, &pred_bwd}) {
        const std::uint8_t f = (*pred)[w_[i]];
        closing_ = c_.inverse(f);
        cell(0, f, 1, 0);
      }
    }
  }

 private:
  std::uint8_t at(int k) const { return w_[(start_ + k) % n_]; }

  // A cell whose boundary, read from `first`, is: shared edge (when off = 1),
  // outer stretch, next shared edge or none, inner stretch reversed.
  void cell(int consumed, std::uint8_t first, int off, int inner_len) {
    const std::size_t mark = inner_.size();
    for (bool forward : {true, false}) {
      const auto& s = c_.succ(forward);
      std::uint8_t rel[64];
      rel[0] = first;
      for (int k = 1; k < len_; ++k) rel[k] = s[rel[k - 1]];
      for (int p = 1; off + p <= len_ && consumed + p <= n_; ++p) {
        if (rel[off + p - 1] != at(consumed + p - 1)) break;
        const int used = consumed + p;
        if (!closing_) {
          const int q = len_ - off - p;
          if (inner_len + q <= used) {
            append_inner(rel, off + p);
            emit_open(used);
            inner_.resize(mark);
          }
        }
        if (off + p >= len_) continue;
        const std::uint8_t edge = rel[off + p];
        const int q = len_ - off - p - 1;
        if (2 * (inner_len + q - used) > n_ - used) continue;
        append_inner(rel, off + p + 1);
        if (closing_ && used == n_) {
          if (edge == *closing_ && inner_len + q <= n_) out_(cyclic_reduce_codes(inner_, c_.rank));
        } else if (used < n_) {
          cell(used, c_.inverse(edge), 1, inner_len + q);
        }
        inner_.resize(mark);
      }
    }
  }

  // Inner stretch: inverse of rel[from..len) read backwards.
  void append_inner(const std::uint8_t* rel, int from) {
    for (int k = len_ - 1; k >= from; --k) inner_.push_back(c_.inverse(rel[k]));
  }

  void emit_open(int used) {
    Codes v = inner_;
    for (int k = used; k < n_; ++k) v.push_back(at(k));
    out_(cyclic_reduce_codes(v, c_.rank));
  }

  const Codes& w_;
  const RelatorChains& c_;
  const std::function<void(Codes&&)>& out_;
  int n_;
  int len_;
  int start_ = 0;
  std::optional<std::uint8_t> closing_;
  Codes inner_;
};

}  // namespace

void chain_moves(const Codes& w, const RelatorChains& chains, const std::function<void(Codes&&)>& out) {
  if (chains.length == 0 || w.empty()) return;
  // A row that does not lengthen the word needs a cell with half a relator
  // on the outside, or closes up with every cell taking half - 1 letters.
  const int longest = longest_cyclic_run(w, chains);
  if (longest < chains.half - 1) return;
  if (longest < chains.half && w.size() % static_cast<std::size_t>(chains.half - 1) != 0) return;
  ChainSearch(w, chains, out).run();
}

Codes geodesic_reduce_cyclic_codes(Codes w, const RelatorChains& chains) {
  for (;;) {
    w = dehn_reduce_cyclic_codes(std::move(w), chains);
    if (w.empty() || chains.length == 0) return w;
    Codes shorter;
    chain_moves(w, chains, [&](Codes&& v) {
      if (shorter.empty() && v.size() < w.size()) shorter = std::move(v);
    });
    if (shorter.empty()) return w;
    w = std::move(shorter);
  }
}

OrbitResult chain_orbit(const Codes& w, const RelatorChains& chains) {
  OrbitResult res;
  const Codes first = min_rotation(w);
  res.least = first;
  if (chains.length == 0) return res;
  std::set<Codes> seen{first};
  std::vector<Codes> stack{first};
  while (!stack.empty() && res.shorter.empty()) {
    const Codes x = std::move(stack.back());
    stack.pop_back();
    if (longest_cyclic_run(x, chains) < chains.half - 1) continue;
    chain_moves(x, chains, [&](Codes&& v) {
      if (!res.shorter.empty()) return;
      if (v.size() < x.size() || longest_cyclic_run(v, chains) > chains.half) {
        res.shorter = v.size() < x.size() ? std::move(v) : dehn_reduce_cyclic_codes(v, chains);
        return;
      }
      Codes m = min_rotation(v);
      if (seen.insert(m).second) {
        if (m < res.least) res.least = m;
        stack.push_back(std::move(m));
      }
    });
  }
  if (!res.shorter.empty()) res.least.clear();
  return res;
}

}  // namespace geodesics::detail
