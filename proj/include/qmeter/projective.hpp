#pragma once

#include <cstddef>
#include <vector>

#include "qmeter/core.hpp"
#include "qmeter/random.hpp"

namespace qmeter {

// Ideal (collapse) measurement of a diagonal observable.

struct StrongOutcome {
  std::size_t index;   // eigenstate the state collapsed onto
  double value;        // eigenvalue read off the apparatus
  PureState post;      // post-measurement state (basis vector `index`)
};

// One measurement: outcome i with probability |<i|psi>|^2, state -> |i>.
StrongOutcome sample_strong(const PureState& psi, const Observable& s, RandomStream& rng);

struct StrongTrajectory {
  std::vector<double> outcomes;  // n_repeats entries, all equal after collapse
  std::size_t collapsed_index;
  double mean;                   // running mean of outcomes == collapsed eigenvalue
};

// Measure, then re-measure the collapsed state n_repeats-1 more times.
StrongTrajectory run_strong_trajectory(const PureState& psi, const Observable& s,
                                       std::size_t n_repeats, RandomStream& rng);

// Probability weight of an outcome record under repeated ideal measurement:
// |alpha_i|^2 if every outcome equals the same eigenvalue s_i, else 0.
// Outcomes must structurally equal spectrum values (they are copied, never
// recomputed); a value outside the spectrum is a caller error.
double strong_joint_density(const std::vector<double>& outcomes, const PureState& psi,
                            const Observable& s);

struct PointMass {
  double value;
  double weight;
};

// Distribution of the trajectory mean: point masses |alpha_i|^2 at s_i.
std::vector<PointMass> strong_mean_distribution(const PureState& psi, const Observable& s);

}  // namespace qmeter
