#pragma once

#include <cstddef>
#include <vector>

#include "qmeter/core.hpp"
#include "qmeter/random.hpp"

namespace qmeter {

// Exact-copy impossibility, amplitude-information cloning for bosonic modes,
// and the optimal trade-off formulas for imperfect cloning.

struct NoCloningCheck {
  double residual;  // |c - c^{n+1}|
  bool consistent;  // residual below 1e-12
};

// A linear cloner forces <phi|psi> = <phi|psi>^{n+1}; only overlaps 0 and 1
// survive.  Reports how badly a given overlap violates the constraint.
NoCloningCheck nocloning_constraint(cdouble overlap, std::size_t n_clones);

// Difference between the superposition expectation and the probability mix of
// branch expectations: |<O>_{a s1 + b s2} - (|a|^2 <O>_{s1} + |b|^2 <O>_{s2})|
// with (a, b) normalized to |a|^2 + |b|^2 = 1.  Nonzero exactly when the
// observable has cross terms between the branches — the interference a
// state-copying device would have to preserve but cannot.
double linearity_probe(const PureState& s1, const PureState& s2, cdouble a, cdouble b,
                       const HermitianOperator& obs);

// Orthogonal rotation on the (source, clone_1..clone_n) mode amplitudes
// induced by hopping couplings r_j > 0: first row (cos Rt, (r_j/R) sin Rt),
// first column (cos Rt, -(r_j/R) sin Rt), clone block
// delta_jk + (r_j r_k/R^2)(cos Rt - 1), with R = sqrt(sum r_j^2).
Eigen::MatrixXd induced_unitary(const std::vector<double>& couplings, double t);

struct InfoCloneResult {
  cdouble source_amplitude;               // alpha cos Rt + sqrt(n) beta sin Rt
  std::vector<cdouble> clone_amplitudes;  // each -(alpha/sqrt(n)) sin Rt + beta cos Rt
};

// Equal couplings r and equal blank amplitudes beta (the only arrangement
// that yields identical clones); R = r sqrt(n).
InfoCloneResult info_clone(cdouble alpha, cdouble beta, std::size_t n_clones, double t,
                           double coupling = 1.0);

// First t > 0 with sin(R t) = -1, i.e. full transfer alpha -> clones alpha/sqrt(n).
double info_clone_full_transfer_time(std::size_t n_clones, double coupling = 1.0);

enum class Quadrature { Position, Momentum };

// One quadrature measurement on a coherent state of amplitude amp:
// position ~ N(sqrt2 Re amp, 1/2), momentum ~ N(sqrt2 Im amp, 1/2).
double sample_coherent_quadrature(cdouble amp, Quadrature which, RandomStream& rng);

struct AlphaEstimate {
  cdouble alpha_hat;
  double std_per_component;  // sampling std of each estimate component
  std::size_t n_used;
};

// Reconstruct the source amplitude from n >= 2 identical clones of amplitude
// alpha/sqrt(n): positions on ceil(n/2) copies, momenta on the rest, then
// alpha_hat = sqrt(n/2) (xbar + i pbar).  The per-component std is 1/sqrt2
// for even n, independent of n.
AlphaEstimate estimate_alpha(const std::vector<cdouble>& clones, RandomStream& rng);

// (n m + m + n) / (m (n + 2)): optimal qubit n->m cloning fidelity.
double qubit_fidelity(std::size_t n_in, std::size_t m_out);
double qubit_fidelity_limit(std::size_t n_in);  // m -> infinity: (n+1)/(n+2)

// n/m + (m-n)(n+1)/(m(n+d)): optimal d-level n->m fidelity.
double d_dim_fidelity(std::size_t n_in, std::size_t m_out, std::size_t d);

// eta(n,m,d) = (n/m)(m+d)/(n+d): shrink factor of the cloned state
// rho -> eta rho + (1-eta) I/d.
double clone_shrink_factor(std::size_t n_in, std::size_t m_out, std::size_t d);
DensityMatrix d_dim_clone_state(const DensityMatrix& rho, std::size_t n_in, std::size_t m_out,
                                std::size_t d);

// Expectation scaling of qubit observables with vanishing expectation in the
// orthogonal state, on a 1->m clone: <O>_clone = factor * <O>_true with
// factor = qubit_fidelity(1, m); tends to 2/3.
double qubit_clone_expectation_factor(std::size_t m_out);

// m n / (m n + m - n): fidelity ceiling for coherent-state n->m cloning; 1/2
// as m -> infinity at n = 1.
double coherent_fidelity_bound(std::size_t n_in, std::size_t m_out);

struct CoherentCloneMoments {
  double mean_x, mean_p;  // sqrt2 Re alpha, sqrt2 Im alpha
  double var_x, var_p;    // 1/2 + sigma^2 each
  double sigma2;          // added amplitude noise 1/n - 1/m
};

CoherentCloneMoments coherent_clone_moments(cdouble alpha, std::size_t n_in, std::size_t m_out);

// Draw the coherent label of one clone: alpha plus complex Gaussian noise
// with variance sigma^2(n,m)/2 per real component (so each quadrature of the
// smeared state has total variance 1/2 + sigma^2).  n = m returns alpha.
cdouble sample_coherent_clone(cdouble alpha, std::size_t n_in, std::size_t m_out,
                              RandomStream& rng);

}  // namespace qmeter
