#include "geodesics/markov_system.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "geodesics/error.hpp"

namespace geodesics {

namespace {

std::vector<std::uint8_t> boolean_product(int k, const std::vector<std::uint8_t>& x,
                                          const std::vector<std::uint8_t>& y) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(k * k), 0);
  for (int i = 0; i < k; ++i) {
    for (int l = 0; l < k; ++l) {
      if (!x[static_cast<std::size_t>(i * k + l)]) continue;
      for (int j = 0; j < k; ++j) {
        if (y[static_cast<std::size_t>(l * k + j)]) out[static_cast<std::size_t>(i * k + j)] = 1;
      }
    }
  }
  return out;
}

std::string real17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

bool is_primitive_matrix(int k, const std::vector<std::uint8_t>& transition) {
  // Wielandt: a primitive k x k matrix has A^m > 0 for m = (k-1)^2 + 1.
  std::vector<std::uint8_t> power = transition;
  const int bound = (k - 1) * (k - 1) + 1;
  for (int m = 1; m <= bound; ++m) {
    bool positive = true;
    for (auto v : power) positive = positive && v != 0;
    if (positive) return true;
    power = boolean_product(k, power, transition);
  }
  return false;
}

MarkovChainSystem::MarkovChainSystem(int k, std::vector<std::uint8_t> transition,
                                     std::vector<double> roof)
    : k_(k), transition_(std::move(transition)), roof_(std::move(roof)) {
  if (k < 1 || k > 62) throw std::invalid_argument("number of states must be in [1, 62]");
  if (transition_.size() != static_cast<std::size_t>(k * k)) {
    throw std::invalid_argument("transition matrix must have k*k entries");
  }
  if (roof_.size() != static_cast<std::size_t>(k)) {
    throw std::invalid_argument("roof must have k entries");
  }
  for (auto& v : transition_) {
    if (v > 1) throw std::invalid_argument("transition entries must be 0 or 1");
  }
  for (double r : roof_) {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("roof values must be positive");
  }
  if (!is_primitive_matrix(k, transition_)) {
    throw std::invalid_argument("transition matrix is not aperiodic and irreducible");
  }
}

MarkovChainSystem MarkovChainSystem::full_shift(std::vector<double> roof) {
  const int k = static_cast<int>(roof.size());
  return MarkovChainSystem(k, std::vector<std::uint8_t>(static_cast<std::size_t>(k * k), 1),
                           std::move(roof));
}

MarkovChainSystem MarkovChainSystem::free_group_no_backtrack(int rank) {
  const int k = 2 * rank;
  std::vector<std::uint8_t> t(static_cast<std::size_t>(k * k), 1);
  for (int i = 0; i < k; ++i) t[static_cast<std::size_t>(i * k + (i + rank) % k)] = 0;
  return MarkovChainSystem(k, std::move(t), std::vector<double>(static_cast<std::size_t>(k), 1.0));
}

MarkovChainSystem MarkovChainSystem::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    const int k = j.at("k").get<int>();
    auto flat = j.at("transition");
    std::vector<std::uint8_t> t;
    for (const auto& v : flat) {
      if (v.is_array()) {
        for (const auto& x : v) t.push_back(static_cast<std::uint8_t>(x.get<int>()));
      } else {
        t.push_back(static_cast<std::uint8_t>(v.get<int>()));
      }
    }
    return MarkovChainSystem(k, std::move(t), j.at("roof").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("system spec: ") + e.what());
  }
}

MarkovChainSystem MarkovChainSystem::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string MarkovChainSystem::to_json() const {
  nlohmann::ordered_json j;
  j["k"] = k_;
  std::vector<int> t(transition_.begin(), transition_.end());
  j["transition"] = t;
  j["roof"] = roof_;
  return j.dump();
}

MarkovChainSystem MarkovChainSystem::scaled(double c) const {
  std::vector<double> r = roof_;
  for (double& x : r) x *= c;
  return MarkovChainSystem(k_, transition_, std::move(r));
}

std::string MarkovChainSystem::describe() const {
  std::string s = "shift:k=" + std::to_string(k_) + ":transition=";
  for (int i = 0; i < k_; ++i) {
    if (i) s += '/';
    for (int j = 0; j < k_; ++j) s += allowed(i, j) ? '1' : '0';
  }
  return s;
}

std::string MarkovChainSystem::describe_roof() const {
  std::string s = "roof=";
  for (std::size_t i = 0; i < roof_.size(); ++i) {
    if (i) s += ',';
    s += real17(roof_[i]);
  }
  return s;
}

}  // namespace geodesics
