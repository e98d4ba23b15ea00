#include "qmeter/projective.hpp"

namespace qmeter {

namespace {
PureState basis_state(std::size_t dim, std::size_t index) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(std::move(v));
}
}  // namespace

StrongOutcome sample_strong(const PureState& psi, const Observable& s, RandomStream& rng) {
  if (psi.dim() != s.dim()) throw std::invalid_argument("sample_strong: dimension mismatch");
  const std::size_t i = rng.categorical(psi.probabilities());
  return StrongOutcome{i, s.eigenvalue(i), basis_state(psi.dim(), i)};
}

StrongTrajectory run_strong_trajectory(const PureState& psi, const Observable& s,
                                       std::size_t n_repeats, RandomStream& rng) {
  if (n_repeats == 0) throw std::invalid_argument("run_strong_trajectory: need n_repeats >= 1");
  const StrongOutcome first = sample_strong(psi, s, rng);
  StrongTrajectory traj;
  traj.collapsed_index = first.index;
  // The collapsed state is an eigenstate, so every further measurement
  // reproduces the same eigenvalue with certainty; copy, do not resample.
  traj.outcomes.assign(n_repeats, first.value);
  traj.mean = first.value;
  return traj;
}

double strong_joint_density(const std::vector<double>& outcomes, const PureState& psi,
                            const Observable& s) {
  if (psi.dim() != s.dim()) throw std::invalid_argument("strong_joint_density: dimension mismatch");
  if (outcomes.empty()) throw std::invalid_argument("strong_joint_density: empty outcome record");
  for (double p : outcomes) {
    bool known = false;
    for (double e : s.eigenvalues()) known = known || (p == e);
    if (!known) throw std::invalid_argument("strong_joint_density: outcome not in the spectrum");
  }
  for (std::size_t j = 1; j < outcomes.size(); ++j)
    if (outcomes[j] != outcomes[0]) return 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i)
    if (outcomes[0] == s.eigenvalue(i)) return std::norm(psi.amplitude(i));
  return 0.0;  // unreachable: membership checked above
}

std::vector<PointMass> strong_mean_distribution(const PureState& psi, const Observable& s) {
  if (psi.dim() != s.dim())
    throw std::invalid_argument("strong_mean_distribution: dimension mismatch");
  std::vector<PointMass> dist(s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i)
    dist[i] = PointMass{s.eigenvalue(i), std::norm(psi.amplitude(i))};
  return dist;
}

}  // namespace qmeter
