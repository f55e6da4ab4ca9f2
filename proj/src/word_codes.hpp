#pragma once

// Code-level word machinery shared by the reductions and the necklace engine.
// A word is a vector of letter codes in [0, 2r); inverse(c) = (c + r) mod 2r.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "geodesics/group_core.hpp"

namespace geodesics {

/// Sets the canonical flag; only for words already in canonical form.
CyclicWord mark_canonical(CyclicWord w);

}  // namespace geodesics

namespace geodesics::detail {

using Codes = std::vector<std::uint8_t>;

struct Run {
  int start = 0;   // index of the first letter
  int length = 0;  // number of letters
  bool forward = true;
};

/// Successor tables for the relator R and for R^-1. Each letter occurs
/// exactly once in R, so a subword of R (or R^-1) is a chain x, succ(x), ...
struct RelatorChains {
  int rank = 0;
  int length = 0;  // |R|
  int half = 0;    // |R| / 2
  std::vector<std::uint8_t> succ_fwd;
  std::vector<std::uint8_t> succ_bwd;

  static RelatorChains from(const SurfacePresentation& p);

  std::uint8_t inverse(std::uint8_t c) const noexcept {
    return static_cast<std::uint8_t>((c + rank) % (2 * rank));
  }
  const std::vector<std::uint8_t>& succ(bool forward) const noexcept {
    return forward ? succ_fwd : succ_bwd;
  }

  /// Maximal chain runs of a cyclic word. `full` is set when every cyclic
  /// link is a chain link (the word is a power of a relator rotation).
  std::vector<Run> cyclic_runs(const Codes& w, bool& full) const;
  std::vector<Run> linear_runs(const Codes& w) const;

  /// Inverse of the piece of R that follows a chain of `m` letters starting
  /// at `first`; the chain times this piece is a rotation of R (or R^-1).
  Codes complement_inverse(std::uint8_t first, int m, bool forward) const;
};

Codes to_codes(std::span<const Letter> letters, int rank);
Letters to_letters(const Codes& codes, int rank);

/// Free reduction with a stack.
Codes free_reduce_codes(const Codes& w, int rank);
/// Free reduction followed by stripping inverse end pairs.
Codes cyclic_reduce_codes(const Codes& w, int rank);

bool is_cyclically_reduced(const Codes& w, int rank);

/// Least rotation (naive, words here are short).
Codes min_rotation(const Codes& w);

/// Cyclic Dehn reduction; returns an empty vector for the identity.
Codes dehn_reduce_cyclic_codes(Codes w, const RelatorChains& chains);
Codes dehn_reduce_linear_codes(Codes w, const RelatorChains& chains);

/// Longest cyclic chain run of w (|w| when w is a power of a relator rotation).
int longest_cyclic_run(const Codes& w, const RelatorChains& chains);

/// Moves across a one-layer annulus: a stretch of the cyclic word w is the
/// outer boundary of a row of relator cells, consecutive cells sharing one
/// edge, and is replaced by the inner boundary. When the row closes up the
/// whole word is replaced by a conjugate. Calls `out` with every result, after
/// cyclic reduction, whose length before reduction does not exceed |w|.
/// Expects w to be cyclically Dehn-reduced.
void chain_moves(const Codes& w, const RelatorChains& chains, const std::function<void(Codes&&)>& out);

/// Shortest conjugate, by Dehn steps and shortening chain moves. Empty for
/// the identity.
Codes geodesic_reduce_cyclic_codes(Codes w, const RelatorChains& chains);

struct OrbitResult {
  Codes least;    // least rotation over the orbit, when every member is shortest
  Codes shorter;  // otherwise a strictly shorter conjugate
};

/// Closure of w under rotations and length-preserving chain moves.
OrbitResult chain_orbit(const Codes& w, const RelatorChains& chains);

}  // namespace geodesics::detail
