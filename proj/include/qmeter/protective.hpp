#pragma once

#include <array>
#include <cstddef>

#include "qmeter/core.hpp"
#include "qmeter/random.hpp"

namespace qmeter {

// Adiabatic (protected-state) measurement: the measured state is a
// non-degenerate eigenstate of the system Hamiltonian, the meter couples with
// strength 1/T for a time T, and in the ideal limit the pointer shifts by the
// expectation value while the state survives intact.  Failure branches carry
// probability ~ c^2/T^2.

// r0 + <S>_psi: the ideal pointer reading.
double ideal_pointer_shift(const PureState& psi, const Observable& s, double r0);

// First-order level shift omega_j + a_i <j|S|j> / T.
double perturbed_eigenvalue(double omega_j, double a_i, double s_jj, double t_total);

enum class BranchKind {
  ProtectedCorrectPointer = 1,  // state kept, pointer at r0 + <S>
  ProtectedRandomPointer = 2,   // state kept, pointer smeared uniformly
  CollapsedOrthoPointer = 3,    // state collapsed to an orthogonal state, pointer at its <S>
  CollapsedRandomPointer = 4,   // state collapsed, pointer smeared uniformly
};

struct ProtectiveConfig {
  double t_total = 10.0;
  double c2 = 1.0, c3 = 1.0, c4 = 1.0;  // branch amplitudes (probability c^2/T^2)
  double r0 = 0.0;                      // initial pointer position
};

struct ProtectiveBranch {
  BranchKind kind;
  PureState post_state;
  double pointer_reading;
};

// {P1, P2, P3, P4} with P1 = 1 - (c2^2+c3^2+c4^2)/T^2, Pk = ck^2/T^2.
std::array<double, 4> protective_branch_probabilities(const ProtectiveConfig& cfg);

// Draw one measurement record from the branch model.  Smeared pointers are
// uniform over [r0 + min(S), r0 + max(S)]; the flipped state is orthogonal to
// psi (the unique one for qubits, a uniformly drawn complement basis vector
// in higher dimension).
ProtectiveBranch sample_protective_branch(const PureState& psi, const Observable& s,
                                          const ProtectiveConfig& cfg, RandomStream& rng);

// Meter unitary for the impulsive coupling -pi g(t) Pup (x) Pxminus with
// integrated strength 1 over the duration t_total: exp(i pi Pup (x) Pxm)
// = I - 2 Pup (x) Pxm, independent of t_total.  Maps |up, d_down> ->
// |up, d_up> and leaves |down, d_down> fixed.
// Basis order: |up d_up>, |up d_down>, |down d_up>, |down d_down>.
Eigen::Matrix4cd two_qubit_interaction_unitary(double t_total);

struct TwoQubitPulse {
  double gap = 1.0;     // protection gap of the system Hamiltonian
  double ramp = 10.0;   // adiabatic switch-off window (clipped to T)
  int substeps = 256;   // piecewise-constant resolution of the ramp
};

struct TwoQubitResult {
  Eigen::Vector4cd joint_state;  // basis as above, system factor first
  double p_protect = 0.0;        // prob. of finding the system still in (alpha, beta)
  double p_fail = 0.0;           // 1 - p_protect
  double pointer_angle = 0.0;    // extracted rotation of the meter qubit, in [0, pi]
};

// Evolve (alpha|up> + beta|down>) (x) |d_down> under
//   H(t) = gap |nu_perp><nu_perp| (x) I  -  pi g(t) Pup (x) Pxminus,
// where g holds 1/T and is ramped to zero cosine-squared over the final
// `ramp` window (adiabatic disengagement; sudden engagement at t=0).  The
// pointer angle is 2 arccos sqrt(<d_down| tr_sys rho |d_down>) and tends to
// pi |alpha|^2 with O(1/T) error; p_fail falls off as 1/T^2.
TwoQubitResult evolve_two_qubit_protective(cdouble alpha, cdouble beta, double t_total,
                                           const TwoQubitPulse& pulse = {});

struct PointerXState {
  Eigen::Vector2cd coefficients;            // (|d_up> - |d_down>)/sqrt(2)
  Eigen::Vector2cd alternate_coefficients;  // (|d_up> + |d_down>)/sqrt(2) labeling
};

// The meter x-basis state fed by the failed branch; both sign labelings are
// exposed, and only squared moduli are contract-stable.
PointerXState failed_branch_pointer_state();

}  // namespace qmeter
