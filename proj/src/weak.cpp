#include "qmeter/weak.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qmeter {

namespace {
void check_args(const PureState& psi, const Observable& s, double delta_p, const char* who) {
  if (psi.dim() != s.dim()) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  if (!(delta_p > 0.0)) throw std::invalid_argument(std::string(who) + ": delta_p must be > 0");
}
}  // namespace

GaussianMixture1D weak_outcome_density(const PureState& psi, const Observable& s, double delta_p) {
  check_args(psi, s, delta_p, "weak_outcome_density");
  GaussianMixture1D mix;
  mix.weights = psi.probabilities();
  mix.means = s.eigenvalues();
  mix.sigmas.assign(s.dim(), delta_p / std::sqrt(2.0));
  return mix;
}

double sample_weak(const PureState& psi, const Observable& s, double delta_p, RandomStream& rng) {
  check_args(psi, s, delta_p, "sample_weak");
  const std::size_t i = rng.categorical(psi.probabilities());
  return rng.normal(s.eigenvalue(i), delta_p / std::sqrt(2.0));
}

PureState weak_update(const PureState& psi, const Observable& s, double delta_p, double outcome) {
  check_args(psi, s, delta_p, "weak_update");
  if (!std::isfinite(outcome)) throw std::invalid_argument("weak_update: non-finite outcome");
  const double inv = 1.0 / (2.0 * delta_p * delta_p);
  // Exponents shifted by their minimum: the largest damping factor becomes 1,
  // so renormalization cannot underflow however far out the outcome lies.
  std::vector<double> expo(s.dim());
  double emin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.dim(); ++i) {
    const double d = outcome - s.eigenvalue(i);
    expo[i] = d * d * inv;
    emin = std::min(emin, expo[i]);
  }
  CVector out(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t i = 0; i < s.dim(); ++i)
    out(static_cast<Eigen::Index>(i)) = psi.amplitude(i) * std::exp(-(expo[i] - emin));
  if (!(out.norm() > 0.0))
    throw NumericalError("weak_update: renormalization underflow");
  return PureState(std::move(out));
}

WeakTrajectory run_weak_trajectory(const PureState& psi, const Observable& s, double delta_p,
                                   std::size_t m, RandomStream& rng, WeakRecord record) {
  check_args(psi, s, delta_p, "run_weak_trajectory");
  if (m == 0) throw std::invalid_argument("run_weak_trajectory: need m >= 1");
  WeakTrajectory traj{.outcomes = {}, .states = {}, .final_state = psi, .mean_outcome = 0.0, .converged_to = {}};
  if (record != WeakRecord::None) traj.outcomes.reserve(m);
  if (record == WeakRecord::Full) traj.states.reserve(m);
  PureState state = psi;
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double p = sample_weak(state, s, delta_p, rng);
    state = weak_update(state, s, delta_p, p);
    acc += p;
    if (record != WeakRecord::None) traj.outcomes.push_back(p);
    if (record == WeakRecord::Full) traj.states.push_back(state);
  }
  traj.final_state = state;
  traj.mean_outcome = acc / static_cast<double>(m);
  const std::vector<double> probs = state.probabilities();
  const auto it = std::max_element(probs.begin(), probs.end());
  if (*it >= kWeakConvergenceThreshold)
    traj.converged_to = static_cast<std::size_t>(it - probs.begin());
  return traj;
}

double weak_joint_log_density(const std::vector<double>& outcomes, const PureState& psi,
                              const Observable& s, double delta_p) {
  check_args(psi, s, delta_p, "weak_joint_log_density");
  if (outcomes.empty()) throw std::invalid_argument("weak_joint_log_density: empty record");
  const double inv = 1.0 / (delta_p * delta_p);
  const double log_n2 = -0.5 * std::log(M_PI * delta_p * delta_p);  // log N^2, N^2 sqrt(pi dp^2)=1
  std::vector<double> terms(s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i) {
    double e = std::log(std::max(std::norm(psi.amplitude(i)),
                                 std::numeric_limits<double>::denorm_min()));
    for (double p : outcomes) {
      const double d = p - s.eigenvalue(i);
      e -= d * d * inv;
    }
    terms[i] = e;
  }
  double mx = -std::numeric_limits<double>::infinity();
  for (double t : terms) mx = std::max(mx, t);
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - mx);
  return static_cast<double>(outcomes.size()) * log_n2 + mx + std::log(acc);
}

double weak_joint_density(const std::vector<double>& outcomes, const PureState& psi,
                          const Observable& s, double delta_p) {
  return std::exp(weak_joint_log_density(outcomes, psi, s, delta_p));
}

GaussianMixture1D weak_mean_distribution(const PureState& psi, const Observable& s, double delta_p,
                                         std::size_t m) {
  check_args(psi, s, delta_p, "weak_mean_distribution");
  if (m == 0) throw std::invalid_argument("weak_mean_distribution: need m >= 1");
  GaussianMixture1D mix;
  mix.weights = psi.probabilities();
  mix.means = s.eigenvalues();
  mix.sigmas.assign(s.dim(), delta_p / std::sqrt(2.0 * static_cast<double>(m)));
  return mix;
}

CMatrix weak_reduced_density_after(const PureState& psi, const Observable& s, double delta_p,
                                   std::size_t m) {
  check_args(psi, s, delta_p, "weak_reduced_density_after");
  const double inv = static_cast<double>(m) / (4.0 * delta_p * delta_p);
  const auto d = static_cast<Eigen::Index>(s.dim());
  CMatrix rho(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const double gap = s.eigenvalue(static_cast<std::size_t>(i)) -
                         s.eigenvalue(static_cast<std::size_t>(j));
      rho(i, j) = psi.amplitudes()(i) * std::conj(psi.amplitudes()(j)) *
                  std::exp(-gap * gap * inv);
    }
  return rho;
}

double weak_resource_ratio_exact(double delta_p, double spread, std::size_t m_strong) {
  if (!(delta_p > 0.0)) throw std::invalid_argument("weak_resource_ratio: delta_p must be > 0");
  if (!(spread > 0.0)) throw std::invalid_argument("weak_resource_ratio: spread must be > 0");
  if (m_strong == 0) throw std::invalid_argument("weak_resource_ratio: need m_strong >= 1");
  const double r = delta_p / spread;
  return r * r * static_cast<double>(m_strong) / 2.0;
}

std::size_t weak_resource_ratio(double delta_p, double spread, std::size_t m_strong) {
  return static_cast<std::size_t>(std::ceil(weak_resource_ratio_exact(delta_p, spread, m_strong)));
}

}  // namespace qmeter
