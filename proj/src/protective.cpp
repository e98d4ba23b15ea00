#include "qmeter/protective.hpp"

#include <algorithm>
#include <cmath>

namespace qmeter {

double ideal_pointer_shift(const PureState& psi, const Observable& s, double r0) {
  return r0 + expectation(psi, s);
}

double perturbed_eigenvalue(double omega_j, double a_i, double s_jj, double t_total) {
  if (!(t_total > 0.0)) throw std::invalid_argument("perturbed_eigenvalue: t_total must be > 0");
  return omega_j + a_i * s_jj / t_total;
}

std::array<double, 4> protective_branch_probabilities(const ProtectiveConfig& cfg) {
  if (!(cfg.t_total > 0.0))
    throw std::invalid_argument("protective_branch_probabilities: t_total must be > 0");
  const double t2 = cfg.t_total * cfg.t_total;
  const double p2 = cfg.c2 * cfg.c2 / t2;
  const double p3 = cfg.c3 * cfg.c3 / t2;
  const double p4 = cfg.c4 * cfg.c4 / t2;
  const double p1 = 1.0 - (p2 + p3 + p4);
  if (p1 < 0.0)
    throw std::invalid_argument(
        "protective_branch_probabilities: branch constants too large for this t_total");
  return {p1, p2, p3, p4};
}

namespace {

// A state orthogonal to psi: the unique one for qubits; in higher dimension a
// uniformly drawn unit vector in the orthogonal complement.
PureState orthogonal_state(const PureState& psi, RandomStream& rng) {
  const std::size_t d = psi.dim();
  if (d == 2) {
    CVector v(2);
    v(0) = -std::conj(psi.amplitude(1));
    v(1) = std::conj(psi.amplitude(0));
    return PureState(std::move(v));
  }
  // Random complex Gaussian vector, projected off psi (repeat on the
  // measure-zero degenerate draw).
  for (;;) {
    CVector v(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) v(static_cast<Eigen::Index>(i)) = cdouble(rng.normal(), rng.normal());
    const cdouble overlap = psi.amplitudes().adjoint() * v;
    v -= overlap * psi.amplitudes();
    if (v.norm() > 1e-8) return PureState(std::move(v));
  }
}

}  // namespace

ProtectiveBranch sample_protective_branch(const PureState& psi, const Observable& s,
                                          const ProtectiveConfig& cfg, RandomStream& rng) {
  if (psi.dim() != s.dim())
    throw std::invalid_argument("sample_protective_branch: dimension mismatch");
  const std::array<double, 4> probs = protective_branch_probabilities(cfg);
  const std::size_t branch =
      rng.categorical(std::vector<double>(probs.begin(), probs.end()));
  const double lo = cfg.r0 + s.min_eigenvalue();
  const double hi = cfg.r0 + s.max_eigenvalue();
  switch (branch) {
    case 0:
      return {BranchKind::ProtectedCorrectPointer, psi, ideal_pointer_shift(psi, s, cfg.r0)};
    case 1:
      return {BranchKind::ProtectedRandomPointer, psi, rng.uniform(lo, hi)};
    case 2: {
      PureState collapsed = orthogonal_state(psi, rng);
      const double reading = ideal_pointer_shift(collapsed, s, cfg.r0);
      return {BranchKind::CollapsedOrthoPointer, std::move(collapsed), reading};
    }
    default: {
      PureState collapsed = orthogonal_state(psi, rng);
      return {BranchKind::CollapsedRandomPointer, std::move(collapsed), rng.uniform(lo, hi)};
    }
  }
}

Eigen::Matrix4cd two_qubit_interaction_unitary(double t_total) {
  if (!(t_total > 0.0))
    throw std::invalid_argument("two_qubit_interaction_unitary: t_total must be > 0");
  // exp(i pi P (x) P) = I - 2 P (x) P for a projector: exact, no series needed.
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Identity();
  // Pxminus in the meter basis {d_up, d_down} is [[.5,-.5],[-.5,.5]]; the
  // system-up block of I - 2 P (x) P is therefore the meter flip.
  u(0, 0) = 0.0;
  u(0, 1) = 1.0;
  u(1, 0) = 1.0;
  u(1, 1) = 0.0;
  return u;
}

TwoQubitResult evolve_two_qubit_protective(cdouble alpha, cdouble beta, double t_total,
                                           const TwoQubitPulse& pulse) {
  if (!(t_total > 0.0))
    throw std::invalid_argument("evolve_two_qubit_protective: t_total must be > 0");
  if (pulse.substeps < 1)
    throw std::invalid_argument("evolve_two_qubit_protective: substeps must be >= 1");
  const double n2 = std::norm(alpha) + std::norm(beta);
  if (!(n2 > 0.0))
    throw std::invalid_argument("evolve_two_qubit_protective: state has no norm");
  const double inv_norm = 1.0 / std::sqrt(n2);
  const cdouble a = alpha * inv_norm;
  const cdouble b = beta * inv_norm;

  Eigen::Vector2cd nu, nu_perp;
  nu << a, b;
  nu_perp << -std::conj(b), std::conj(a);

  const Eigen::Matrix2cd protect = pulse.gap * (nu_perp * nu_perp.adjoint());
  Eigen::Matrix2cd pup = Eigen::Matrix2cd::Zero();
  pup(0, 0) = 1.0;
  Eigen::Matrix2cd pxm;
  pxm << 0.5, -0.5, -0.5, 0.5;

  auto kron2 = [](const Eigen::Matrix2cd& a2, const Eigen::Matrix2cd& b2) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a2(i, j) * b2;
    return out;
  };
  const Eigen::Matrix4cd h_protect = kron2(protect, Eigen::Matrix2cd::Identity());
  const Eigen::Matrix4cd h_couple = -M_PI * kron2(pup, pxm);

  auto step = [&](const Eigen::Vector4cd& psi, double g, double dt) {
    const Eigen::Matrix4cd h = h_protect + g * h_couple;
    return (matrix_exponential_evolve(HermitianOperator(h), dt) * psi).eval();
  };

  Eigen::Vector4cd psi;
  psi << 0.0, a, 0.0, b;  // (alpha up + beta down) (x) d_down

  const double tau = std::min(pulse.ramp, t_total);
  const double g0 = 1.0 / t_total;
  if (t_total > tau) psi = step(psi, g0, t_total - tau);
  const double dt = tau / pulse.substeps;
  for (int k = 0; k < pulse.substeps; ++k) {
    const double u = (k + 0.5) * dt;
    const double c = std::cos(M_PI * u / (2.0 * tau));
    psi = step(psi, g0 * c * c, dt);
  }

  TwoQubitResult out;
  out.joint_state = psi;
  // System marginal overlap with the protected state.
  const cdouble amp_up = std::conj(a);
  const cdouble amp_dn = std::conj(b);
  const cdouble c_up = amp_up * psi(0) + amp_dn * psi(2);    // <nu|psi> meter d_up
  const cdouble c_dn = amp_up * psi(1) + amp_dn * psi(3);    // <nu|psi> meter d_down
  out.p_protect = std::min(1.0, std::norm(c_up) + std::norm(c_dn));
  out.p_fail = std::max(0.0, 1.0 - out.p_protect);
  // Meter marginal: pointer angle from the d_down survival probability.
  const double pop_down = std::norm(psi(1)) + std::norm(psi(3));
  const double c2 = std::clamp(std::sqrt(std::max(0.0, pop_down)), 0.0, 1.0);
  out.pointer_angle = 2.0 * std::acos(c2);
  return out;
}

PointerXState failed_branch_pointer_state() {
  PointerXState st;
  const double r = 1.0 / std::sqrt(2.0);
  st.coefficients << r, -r;
  st.alternate_coefficients << r, r;
  return st;
}

}  // namespace qmeter
