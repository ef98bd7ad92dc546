#include "pmbobw/rng.hpp"

namespace pmbobw {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double CounterUniform(std::uint64_t seed, RngStream stream, std::uint64_t counter) {
  std::uint64_t h = SplitMix64(seed);
  h = SplitMix64(h ^ static_cast<std::uint64_t>(stream));
  h = SplitMix64(h ^ counter);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

int SampleIndex(const Eigen::VectorXd& p, double u) {
  double cumulative = 0.0;
  int last = -1;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) <= 0.0) continue;
    last = static_cast<int>(i);
    cumulative += p(i);
    if (u < cumulative) return last;
  }
  return last;
}

}  // namespace pmbobw
