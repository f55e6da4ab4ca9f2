#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace geodesics {

/// Subshift of finite type on k states with a per-state roof.
class MarkovChainSystem {
 public:
  /// Throws std::invalid_argument unless the 0-1 matrix (row-major, k x k)
  /// is aperiodic and irreducible and every roof value is positive.
  MarkovChainSystem(int k, std::vector<std::uint8_t> transition, std::vector<double> roof);

  /// Full shift on roof.size() states.
  static MarkovChainSystem full_shift(std::vector<double> roof);
  /// Reduced words of the free group of the given rank, one state per
  /// letter, unit roof.
  static MarkovChainSystem free_group_no_backtrack(int rank);

  /// {"k": 2, "transition": [1,1,1,1], "roof": [1.0, 2.0]}
  static MarkovChainSystem from_json(const std::string& text);
  static MarkovChainSystem load(const std::string& path);
  std::string to_json() const;

  int k() const noexcept { return k_; }
  const std::vector<std::uint8_t>& transition() const noexcept { return transition_; }
  const std::vector<double>& roof() const noexcept { return roof_; }
  bool allowed(int i, int j) const noexcept {
    return transition_[static_cast<std::size_t>(i * k_ + j)] != 0;
  }

  /// Same chain with every roof value multiplied by c > 0.
  MarkovChainSystem scaled(double c) const;

  /// Descriptor strings used in census headers.
  std::string describe() const;
  std::string describe_roof() const;

  friend bool operator==(const MarkovChainSystem&, const MarkovChainSystem&) = default;

 private:
  int k_ = 0;
  std::vector<std::uint8_t> transition_;
  std::vector<double> roof_;
};

/// True when some power of the 0-1 matrix is entrywise positive.
bool is_primitive_matrix(int k, const std::vector<std::uint8_t>& transition);

}  // namespace geodesics
