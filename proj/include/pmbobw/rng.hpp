#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace pmbobw {

// Counter-based randomness: every draw is a pure function of
// (seed, stream, counter), so runs are reproducible and parallel seeds never
// share state.
enum class RngStream : std::uint64_t {
  kOutcome = 1,
  kCorruption = 2,
  kLearner = 3,
};

std::uint64_t SplitMix64(std::uint64_t x);

// Uniform in [0, 1) with 53 random bits.
double CounterUniform(std::uint64_t seed, RngStream stream, std::uint64_t counter);

// Inverse-CDF sample from a probability vector.
int SampleIndex(const Eigen::VectorXd& p, double u);

}  // namespace pmbobw
