// Values produced by tests/oracles/geometry_oracle.py (scipy vertex
// enumeration + numpy least squares) and frozen here.
#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace frozen {

struct GeometryRecord {
  std::string name;
  std::vector<int> cell_dims;
  std::vector<int> pareto;
  std::vector<std::pair<int, int>> edges;
  std::string cls;
};

inline const std::vector<GeometryRecord>& Catalog() {
  static const std::vector<GeometryRecord> records = {
      {"apple_tasting", {1, 1}, {0, 1}, {{0, 1}}, "locally_observable"},
      {"bandit2", {1, 1}, {0, 1}, {{0, 1}}, "locally_observable"},
      {"bandit3", {2, 2, 2}, {0, 1, 2}, {{0, 1}, {0, 2}, {1, 2}}, "locally_observable"},
      {"dynamic_pricing_small", {2, 2, 2}, {0, 1, 2}, {{0, 1}, {0, 2}, {1, 2}},
       "globally_observable"},
      {"full_info_small", {2, 2, 2}, {0, 1, 2}, {{0, 1}, {1, 2}}, "locally_observable"},
      {"hopeless_small", {1, 1}, {0, 1}, {{0, 1}}, "hopeless"},
      {"trivial_small", {1, -1, -1}, {0}, {}, "trivial"},
  };
  return records;
}

// Scalar references evaluated in Python (math module).
constexpr double kGammaPrimeC1Two = 0.08948704332291874;     // c1=2, b1=1/2
constexpr double kLocalOverlay = 1429.307128459966;          // m=2,k=2,k_pi=2,T=1e4
constexpr double kGlobalOverlayPricing = 2774.752477392699;  // c_G=1.5,k_pi=3,T=1e4
constexpr double kLocalBetaThreeSteps = 5.568914100752346;   // c1=2, H=log 2 x3

}  // namespace frozen
