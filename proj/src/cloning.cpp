#include "qmeter/cloning.hpp"

#include <cmath>
#include <stdexcept>

namespace qmeter {

NoCloningCheck nocloning_constraint(cdouble overlap, std::size_t n_clones) {
  if (n_clones == 0) throw std::invalid_argument("nocloning_constraint: need n_clones >= 1");
  if (std::abs(overlap) > 1.0 + 1e-12)
    throw std::invalid_argument("nocloning_constraint: |overlap| must be <= 1");
  cdouble powed = std::pow(overlap, static_cast<double>(n_clones + 1));
  double residual = std::abs(overlap - powed);
  return {residual, residual <= 1e-12};
}

double linearity_probe(const PureState& s1, const PureState& s2, cdouble a, cdouble b,
                       const HermitianOperator& obs) {
  if (s1.dim() != s2.dim() || s1.dim() != obs.dim())
    throw std::invalid_argument("linearity_probe: dimension mismatch");
  const double cross = std::abs(cdouble(s1.amplitudes().adjoint() * s2.amplitudes()));
  if (cross > 1.0 - 1e-10)
    throw std::invalid_argument("linearity_probe: branch states are parallel");
  const double norm2 = std::norm(a) + std::norm(b);
  if (!(norm2 > 0.0)) throw std::invalid_argument("linearity_probe: coefficients vanish");
  const double wa = std::norm(a) / norm2;
  const double wb = std::norm(b) / norm2;
  PureState super(a * s1.amplitudes() + b * s2.amplitudes());
  const double mix = wa * expectation(s1, obs) + wb * expectation(s2, obs);
  return std::abs(expectation(super, obs) - mix);
}

Eigen::MatrixXd induced_unitary(const std::vector<double>& couplings, double t) {
  const std::size_t n = couplings.size();
  if (n == 0) throw std::invalid_argument("induced_unitary: need at least one coupling");
  double r2 = 0.0;
  for (double r : couplings) {
    if (!(r > 0.0)) throw std::invalid_argument("induced_unitary: couplings must be > 0");
    r2 += r * r;
  }
  const double big_r = std::sqrt(r2);
  const double c = std::cos(big_r * t);
  const double s = std::sin(big_r * t);
  Eigen::MatrixXd u(n + 1, n + 1);
  u(0, 0) = c;
  for (std::size_t j = 0; j < n; ++j) {
    u(0, j + 1) = couplings[j] / big_r * s;
    u(j + 1, 0) = -couplings[j] / big_r * s;
    for (std::size_t k = 0; k < n; ++k) {
      u(j + 1, k + 1) = (j == k ? 1.0 : 0.0) + couplings[j] * couplings[k] / r2 * (c - 1.0);
    }
  }
  return u;
}

InfoCloneResult info_clone(cdouble alpha, cdouble beta, std::size_t n_clones, double t,
                           double coupling) {
  if (n_clones == 0) throw std::invalid_argument("info_clone: need n_clones >= 1");
  if (!(coupling > 0.0)) throw std::invalid_argument("info_clone: coupling must be > 0");
  const double sqrt_n = std::sqrt(static_cast<double>(n_clones));
  const double big_r = coupling * sqrt_n;
  const double c = std::cos(big_r * t);
  const double s = std::sin(big_r * t);
  // Amplitude vector (alpha, beta, ..., beta) rotated by induced_unitary with
  // equal couplings; the symmetric start keeps every clone amplitude equal,
  // and the clone-block row sums collapse to -s/sqrt(n) alpha + c beta.
  InfoCloneResult out;
  out.source_amplitude = c * alpha + sqrt_n * s * beta;
  out.clone_amplitudes.assign(n_clones, -s / sqrt_n * alpha + c * beta);
  return out;
}

double info_clone_full_transfer_time(std::size_t n_clones, double coupling) {
  if (n_clones == 0)
    throw std::invalid_argument("info_clone_full_transfer_time: need n_clones >= 1");
  if (!(coupling > 0.0))
    throw std::invalid_argument("info_clone_full_transfer_time: coupling must be > 0");
  // sin(R t) = -1 first at R t = 3 pi / 2.
  return 1.5 * M_PI / (coupling * std::sqrt(static_cast<double>(n_clones)));
}

double sample_coherent_quadrature(cdouble amp, Quadrature which, RandomStream& rng) {
  const double center =
      std::sqrt(2.0) * (which == Quadrature::Position ? amp.real() : amp.imag());
  return rng.normal(center, std::sqrt(0.5));
}

AlphaEstimate estimate_alpha(const std::vector<cdouble>& clones, RandomStream& rng) {
  const std::size_t n = clones.size();
  if (n < 2) throw std::invalid_argument("estimate_alpha: need at least two clones");
  for (const cdouble& c : clones) {
    if (std::abs(c - clones.front()) > 1e-12 * (1.0 + std::abs(clones.front())))
      throw std::invalid_argument("estimate_alpha: clones must share one amplitude");
  }
  const std::size_t n_x = (n + 1) / 2;  // position measurements; momenta on the rest
  const std::size_t n_p = n - n_x;
  double sum_x = 0.0, sum_p = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Quadrature which = i < n_x ? Quadrature::Position : Quadrature::Momentum;
    const double v = sample_coherent_quadrature(clones[i], which, rng);
    (i < n_x ? sum_x : sum_p) += v;
  }
  AlphaEstimate est;
  est.n_used = n;
  // Each clone carries amplitude alpha/sqrt(n), so E[xbar] = sqrt2 Re alpha /
  // sqrt(n) and sqrt(n/2) xbar is unbiased for Re alpha.
  const double scale = std::sqrt(static_cast<double>(n) / 2.0);
  est.alpha_hat = cdouble(scale * sum_x / static_cast<double>(n_x),
                          scale * sum_p / static_cast<double>(n_p));
  // Var(xbar) = (1/2)/n_x, scaled by n/2: component std sqrt(n/(4 n_x)),
  // exactly 1/sqrt2 at even n (reported for the larger position group).
  est.std_per_component = std::sqrt(static_cast<double>(n) / (4.0 * static_cast<double>(n_x)));
  return est;
}

double qubit_fidelity(std::size_t n_in, std::size_t m_out) {
  if (n_in == 0 || m_out < n_in) throw std::invalid_argument("qubit_fidelity: need m >= n >= 1");
  const double n = static_cast<double>(n_in);
  const double m = static_cast<double>(m_out);
  return (m * n + m + n) / (m * (n + 2.0));
}

double qubit_fidelity_limit(std::size_t n_in) {
  if (n_in == 0) throw std::invalid_argument("qubit_fidelity_limit: need n >= 1");
  const double n = static_cast<double>(n_in);
  return (n + 1.0) / (n + 2.0);
}

double d_dim_fidelity(std::size_t n_in, std::size_t m_out, std::size_t d) {
  if (n_in == 0 || m_out < n_in || d < 2)
    throw std::invalid_argument("d_dim_fidelity: need m >= n >= 1, d >= 2");
  const double n = static_cast<double>(n_in);
  const double m = static_cast<double>(m_out);
  const double dd = static_cast<double>(d);
  return n / m + (m - n) * (n + 1.0) / (m * (n + dd));
}

double clone_shrink_factor(std::size_t n_in, std::size_t m_out, std::size_t d) {
  if (n_in == 0 || m_out < n_in || d < 2)
    throw std::invalid_argument("clone_shrink_factor: need m >= n >= 1, d >= 2");
  const double n = static_cast<double>(n_in);
  const double m = static_cast<double>(m_out);
  const double dd = static_cast<double>(d);
  return (n / m) * (m + dd) / (n + dd);
}

DensityMatrix d_dim_clone_state(const DensityMatrix& rho, std::size_t n_in, std::size_t m_out,
                                std::size_t d) {
  if (rho.dim() != d) throw std::invalid_argument("d_dim_clone_state: rho is not d x d");
  const double eta = clone_shrink_factor(n_in, m_out, d);
  const Eigen::Index di = static_cast<Eigen::Index>(d);
  CMatrix mixed =
      eta * rho.matrix() + (1.0 - eta) / static_cast<double>(d) * CMatrix::Identity(di, di);
  return DensityMatrix(std::move(mixed));
}

double qubit_clone_expectation_factor(std::size_t m_out) { return qubit_fidelity(1, m_out); }

double coherent_fidelity_bound(std::size_t n_in, std::size_t m_out) {
  if (n_in == 0 || m_out < n_in)
    throw std::invalid_argument("coherent_fidelity_bound: need m >= n >= 1");
  const double n = static_cast<double>(n_in);
  const double m = static_cast<double>(m_out);
  return (m * n) / (m * n + m - n);
}

CoherentCloneMoments coherent_clone_moments(cdouble alpha, std::size_t n_in, std::size_t m_out) {
  if (n_in == 0 || m_out < n_in)
    throw std::invalid_argument("coherent_clone_moments: need m >= n >= 1");
  const double sigma2 = 1.0 / static_cast<double>(n_in) - 1.0 / static_cast<double>(m_out);
  CoherentCloneMoments mo;
  mo.mean_x = std::sqrt(2.0) * alpha.real();
  mo.mean_p = std::sqrt(2.0) * alpha.imag();
  mo.var_x = 0.5 + sigma2;
  mo.var_p = 0.5 + sigma2;
  mo.sigma2 = sigma2;
  return mo;
}

cdouble sample_coherent_clone(cdouble alpha, std::size_t n_in, std::size_t m_out,
                              RandomStream& rng) {
  if (n_in == 0 || m_out < n_in)
    throw std::invalid_argument("sample_coherent_clone: need m >= n >= 1");
  if (n_in == m_out) return alpha;
  const double sigma2 = 1.0 / static_cast<double>(n_in) - 1.0 / static_cast<double>(m_out);
  const double sd = std::sqrt(sigma2 / 2.0);
  return alpha + cdouble(rng.normal(0.0, sd), rng.normal(0.0, sd));
}

}  // namespace qmeter
