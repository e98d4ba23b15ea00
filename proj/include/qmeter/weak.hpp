#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qmeter/core.hpp"
#include "qmeter/random.hpp"
#include "qmeter/stats.hpp"

namespace qmeter {

// Gaussian-pointer measurement of strength 1/delta_p: one shot reads the
// pointer value p and multiplies each amplitude by exp(-(p-s_i)^2/(2 dp^2)).
// For dp >> spread(S) a single shot barely disturbs the state; repetition
// drives it to an eigenstate while the outcome record stays informative.

inline constexpr double kWeakConvergenceThreshold = 1.0 - 1e-6;

// Single-outcome density: mixture sum_i |alpha_i|^2 N(s_i, dp^2/2).
GaussianMixture1D weak_outcome_density(const PureState& psi, const Observable& s, double delta_p);

// Draw one outcome by two-stage sampling (component index, then Gaussian).
double sample_weak(const PureState& psi, const Observable& s, double delta_p, RandomStream& rng);

// Post-outcome state: alpha_i -> alpha_i exp(-(p-s_i)^2/(2 dp^2)), renormalized.
// Damping factors are rescaled by the largest one before exponentiation, so
// outcomes arbitrarily far in the tail still renormalize cleanly.
PureState weak_update(const PureState& psi, const Observable& s, double delta_p, double outcome);

struct WeakTrajectory {
  std::vector<double> outcomes;          // present unless record == None
  std::vector<PureState> states;         // post-update states, only if record == Full
  PureState final_state;
  double mean_outcome = 0.0;
  std::optional<std::size_t> converged_to;  // set if max_i |alpha_i|^2 >= threshold
};

enum class WeakRecord { None, Outcomes, Full };

WeakTrajectory run_weak_trajectory(const PureState& psi, const Observable& s, double delta_p,
                                   std::size_t m, RandomStream& rng,
                                   WeakRecord record = WeakRecord::Outcomes);

// log of the joint outcome density
//   (N^2)^M sum_i |alpha_i|^2 prod_j exp(-(p_j - s_i)^2 / dp^2),
// evaluated with log-sum-exp; permutation invariant in the outcomes.
double weak_joint_log_density(const std::vector<double>& outcomes, const PureState& psi,
                              const Observable& s, double delta_p);
double weak_joint_density(const std::vector<double>& outcomes, const PureState& psi,
                          const Observable& s, double delta_p);

// Distribution of the M-outcome mean: mixture with component variance dp^2/(2M).
GaussianMixture1D weak_mean_distribution(const PureState& psi, const Observable& s, double delta_p,
                                         std::size_t m);

// Outcome-averaged state after m shots: rho_ij = a_i a_j^* exp(-m (s_i-s_j)^2/(4 dp^2)).
CMatrix weak_reduced_density_after(const PureState& psi, const Observable& s, double delta_p,
                                   std::size_t m);

// Repetitions needed for the weak mean to match the statistical error of
// m_strong ideal repetitions: (dp/spread)^2 * m_strong / 2.
double weak_resource_ratio_exact(double delta_p, double spread, std::size_t m_strong);
std::size_t weak_resource_ratio(double delta_p, double spread, std::size_t m_strong);

}  // namespace qmeter
