#pragma once

// Brute-force conjugacy class counts, independent of the library enumerator.
// Words are ASCII strings over a..d / A..D (capital = inverse).

#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace oracle {

inline char inv(char x) { return (x >= 'a' && x <= 'z') ? char(x - 'a' + 'A') : char(x - 'A' + 'a'); }

inline std::string inverse(const std::string& w) {
  std::string out(w.rbegin(), w.rend());
  for (auto& x : out) x = inv(x);
  return out;
}

inline std::string rotate(const std::string& w, std::size_t k) { return w.substr(k) + w.substr(0, k); }

inline std::string min_rotation(const std::string& w) {
  std::string best = w;
  for (std::size_t k = 1; k < w.size(); ++k) best = std::min(best, rotate(w, k));
  return best;
}

inline bool cyclically_reduced(const std::string& w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[(i + 1) % w.size()] == inv(w[i])) return false;
  }
  return true;
}

/// All cyclically reduced words of length n over `letters`.
inline std::vector<std::string> reduced_words(const std::string& letters, int n) {
  std::vector<std::string> out, frontier{""};
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> next;
    for (const auto& w : frontier) {
      for (char x : letters) {
        if (!w.empty() && x == inv(w.back())) continue;
        next.push_back(w + x);
      }
    }
    frontier.swap(next);
  }
  for (auto& w : frontier) {
    if (n == 1 || cyclically_reduced(w)) out.push_back(w);
  }
  return out;
}

/// Free group: classes at length n are rotation orbits of cyclically reduced words.
inline std::size_t free_class_count(int rank, int n) {
  std::string letters;
  for (int i = 0; i < rank; ++i) letters += char('a' + i);
  for (int i = 0; i < rank; ++i) letters += char('A' + i);
  std::set<std::string> classes;
  for (const auto& w : reduced_words(letters, n)) classes.insert(min_rotation(w));
  return classes.size();
}

struct SurfaceOracle {
  std::vector<std::string> relators;  // all rotations of R and R^-1

  SurfaceOracle() {
    const std::string r = "abcdABCD";
    for (const auto& base : {r, inverse(r)}) {
      for (std::size_t k = 0; k < base.size(); ++k) relators.push_back(rotate(base, k));
    }
  }

  /// Some cyclic subword of length > 4 is a piece of a relator.
  bool dehn_reducible(const std::string& w) const {
    const std::string ww = w + w;
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t len = 5; len <= std::min<std::size_t>(w.size(), 8); ++len) {
        const std::string u = ww.substr(i, len);
        for (const auto& r : relators) {
          if (r.compare(0, len, u) == 0) return true;
        }
      }
    }
    return false;
  }

  /// Words reached by replacing one cyclic half-relator subword by the
  /// inverse of the other half.
  std::vector<std::string> half_swaps(const std::string& w) const {
    std::vector<std::string> out;
    if (w.size() < 4) return out;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const std::string rot = rotate(w, k);
      for (const auto& r : relators) {
        if (rot.compare(0, 4, r, 0, 4) == 0) out.push_back(inverse(r.substr(4)) + rot.substr(4));
      }
    }
    return out;
  }
};

}  // namespace oracle
