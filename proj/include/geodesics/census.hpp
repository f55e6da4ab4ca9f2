#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geodesics/group_core.hpp"
#include "geodesics/hyperbolic_geom.hpp"
#include "geodesics/markov_system.hpp"

namespace geodesics {

/// One directed closed geodesic. The word is stored in the owning Census.
struct GeodesicRecord {
  double ell = 0.0;    // geodesic length
  double trace = 0.0;  // trace of the representing matrix
  std::uint64_t word_offset = 0;
  std::uint32_t id = 0;
  std::uint16_t n = 0;  // word length
  std::uint16_t power = 1;
  bool primitive = true;
};

/// Output of certify_cutoff. min_ell[n] is m(n); index 0 is unused.
struct CutoffReport {
  double alpha_hat = 0.0;
  double T_cert = 0.0;
  std::vector<double> min_ell;
};

/// Not persisted and ignored by equality.
struct BuildInfo {
  std::string created_utc;
  int workers = 0;
  double seconds = 0.0;
  std::size_t flagged_records = 0;  // relative trace error above 1e-7
  double max_trace_error = 0.0;
  std::uint64_t checksum = 0;  // set by load_census
};

class Census {
 public:
  /// Empty census. `alphabet` maps letter codes to word characters.
  Census(std::string presentation, std::string representation, std::string alphabet, int n_max);

  const std::string& presentation() const noexcept { return presentation_; }
  const std::string& representation() const noexcept { return representation_; }
  const std::string& alphabet() const noexcept { return alphabet_; }
  int n_max() const noexcept { return n_max_; }
  /// True for group censuses, false for subshift censuses.
  bool is_group() const;

  /// Sorted by (ell, n, id) once finalized.
  const std::vector<GeodesicRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

  std::span<const std::uint8_t> codes(const GeodesicRecord& r) const {
    return {letters_.data() + r.word_offset, r.n};
  }
  std::string word(const GeodesicRecord& r) const;
  /// Group censuses only.
  CyclicWord cyclic_word(const GeodesicRecord& r) const;

  double T_cert() const noexcept { return cutoff_.T_cert; }
  double alpha_hat() const noexcept { return cutoff_.alpha_hat; }
  const CutoffReport& cutoff() const noexcept { return cutoff_; }

  /// Records per word length, index 0 unused.
  std::vector<std::size_t> count_by_n() const;

  BuildInfo& build_info() noexcept { return info_; }
  const BuildInfo& build_info() const noexcept { return info_; }

  /// Appends a record; call finalize() afterwards.
  void add(std::span<const std::uint8_t> codes, std::uint32_t id, int power, bool primitive,
           double ell, double trace);
  void reserve(std::size_t records, std::size_t letters);
  /// Sorts by (ell, n, id) and recomputes the cutoff.
  void finalize();

  /// Field-for-field comparison; build metadata is ignored.
  friend bool operator==(const Census& x, const Census& y);

 private:
  std::string presentation_;
  std::string representation_;
  std::string alphabet_;
  int n_max_ = 0;
  std::vector<GeodesicRecord> records_;
  std::vector<std::uint8_t> letters_;
  CutoffReport cutoff_;
  BuildInfo info_;
};

struct CensusOptions {
  int workers = 0;  // 0: hardware concurrency
  std::size_t memory_budget_bytes = std::size_t{4} << 30;
};

/// Approximate resident bytes per record, word letters included.
std::size_t census_bytes_per_record(int n_max);

/// Every nontrivial directed class with |gamma| <= n_max, with lengths from
/// the representation. Throws NonHyperbolicError if a class is not
/// hyperbolic or the representation fails verification, and
/// MemoryBudgetExceeded with a progress report if the budget is hit.
Census build_census(const SurfacePresentation& p, const FuchsianRep& rep, int n_max,
                    const CensusOptions& opts = {});

/// Periodic orbits of the subshift with n <= n_max; ell is the roof sum and
/// trace the matching 2 cosh(ell / 2).
Census build_census_from_system(const MarkovChainSystem& sys, int n_max,
                                const CensusOptions& opts = {});

/// m(n) = min ell at word length n, alpha = min m(n)/n, T_cert = alpha (n_max + 1).
CutoffReport certify_cutoff(const Census& c);

struct DedupeAudit {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> merged;      // (kept id, removed id)
  std::vector<std::pair<std::uint32_t, std::uint32_t>> unresolved;  // trace collisions kept
  std::size_t pairs_tested = 0;
};

struct DedupeResult {
  Census census;
  DedupeAudit audit;
};

/// Buckets records by (n, ell rounded to 1e-6) and tests close-trace pairs
/// for conjugacy: rotations, then conjugators of length <= conjugator_bound.
DedupeResult dedupe_classes(const Census& c, int conjugator_bound);

inline constexpr int kCensusFormatVersion = 1;

/// CSV with `# key=value` header lines; returns the data checksum.
/// Throws IoError.
std::uint64_t save_census(const Census& c, const std::string& path);
/// FNV-1a over the data lines exactly as save_census writes them.
std::uint64_t census_checksum(const Census& c);
/// Throws IoError, VersionError, ChecksumError or FormatError.
Census load_census(const std::string& path);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace geodesics
