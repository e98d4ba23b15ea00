#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "qmeter/cloning.hpp"

using namespace qmeter;

TEST_CASE("overlap constraint: only 0 and 1 survive a linear cloner") {
  CHECK(nocloning_constraint(cdouble(0.0, 0.0), 3).consistent);
  CHECK(nocloning_constraint(cdouble(1.0, 0.0), 3).consistent);
  const NoCloningCheck one = nocloning_constraint(cdouble(0.5, 0.0), 1);
  CHECK_FALSE(one.consistent);
  CHECK(one.residual == doctest::Approx(0.25).epsilon(1e-14));  // |0.5 - 0.5^2|
  const NoCloningCheck two = nocloning_constraint(cdouble(0.5, 0.0), 2);
  CHECK(two.residual == doctest::Approx(0.375).epsilon(1e-14));  // |0.5 - 0.5^3|
  // a unimodular overlap that is not 1 also violates the constraint
  const cdouble phase = std::polar(1.0, std::numbers::pi / 3.0);
  CHECK_FALSE(nocloning_constraint(phase, 3).consistent);
  CHECK_THROWS_AS(nocloning_constraint(cdouble(1.1, 0.0), 3), std::invalid_argument);
  CHECK_THROWS_AS(nocloning_constraint(cdouble(0.5, 0.0), 0), std::invalid_argument);
}

TEST_CASE("linearity probe exposes interference that copying destroys") {
  const PureState up = PureState::from_reals({1.0, 0.0});
  const PureState down = PureState::from_reals({0.0, 1.0});
  CMatrix sx(2, 2);
  sx << 0.0, 1.0, 1.0, 0.0;
  const HermitianOperator obs_x(sx);
  const cdouble inv_sqrt2(1.0 / std::sqrt(2.0), 0.0);

  // (|0>+|1>)/sqrt2 has <sigma_x> = 1 but the branch mixture gives 0
  CHECK(linearity_probe(up, down, inv_sqrt2, inv_sqrt2, obs_x) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // diagonal observables cannot tell the superposition from the mixture
  CMatrix sz(2, 2);
  sz << 1.0, 0.0, 0.0, -1.0;
  const HermitianOperator obs_z(sz);
  CHECK(linearity_probe(up, down, inv_sqrt2, inv_sqrt2, obs_z) < 1e-12);

  // parallel inputs and degenerate coefficients are caller errors
  CHECK_THROWS_AS(linearity_probe(up, up, inv_sqrt2, inv_sqrt2, obs_x), std::invalid_argument);
  CHECK_THROWS_AS(linearity_probe(up, down, cdouble(0, 0), cdouble(0, 0), obs_x),
                  std::invalid_argument);
}

TEST_CASE("mode-coupling rotation is orthogonal with the advertised blocks") {
  const std::vector<double> r{0.7, 1.3, 0.4};
  const double big_r = std::sqrt(0.7 * 0.7 + 1.3 * 1.3 + 0.4 * 0.4);
  const double t = 0.9;
  const Eigen::MatrixXd u = induced_unitary(r, t);
  REQUIRE(u.rows() == 4);
  CHECK((u * u.transpose() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(u(0, 0) == doctest::Approx(std::cos(big_r * t)).epsilon(1e-13));
  for (int j = 0; j < 3; ++j) {
    CHECK(u(0, j + 1) == doctest::Approx(r[j] / big_r * std::sin(big_r * t)).epsilon(1e-13));
    CHECK(u(j + 1, 0) == doctest::Approx(-r[j] / big_r * std::sin(big_r * t)).epsilon(1e-13));
    for (int k = 0; k < 3; ++k) {
      const double expect = (j == k ? 1.0 : 0.0) +
                            r[j] * r[k] / (big_r * big_r) * (std::cos(big_r * t) - 1.0);
      CHECK(u(j + 1, k + 1) == doctest::Approx(expect).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(induced_unitary({0.5, -0.1}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(induced_unitary({}, 1.0), std::invalid_argument);
}

TEST_CASE("full transfer spreads the source over the clones") {
  const cdouble alpha(3.0, 2.0);
  const cdouble beta(0.2, -0.1);
  const std::size_t n = 9;
  const double t = info_clone_full_transfer_time(n);
  CHECK(std::sin(std::sqrt(static_cast<double>(n)) * t) == doctest::Approx(-1.0).epsilon(1e-12));

  const InfoCloneResult res = info_clone(alpha, beta, n, t);
  REQUIRE(res.clone_amplitudes.size() == n);
  // sin Rt = -1, cos Rt = 0: clones carry alpha/sqrt(n), source -sqrt(n) beta
  for (const cdouble& c : res.clone_amplitudes)
    CHECK(std::abs(c - alpha / std::sqrt(9.0)) < 1e-10);
  CHECK(std::abs(res.source_amplitude - (-3.0) * beta) < 1e-10);

  // the rotation is orthogonal: total |amplitude|^2 is conserved at any t
  const InfoCloneResult partial = info_clone(alpha, beta, n, 0.37);
  double total = std::norm(partial.source_amplitude);
  for (const cdouble& c : partial.clone_amplitudes) total += std::norm(c);
  CHECK(total == doctest::Approx(std::norm(alpha) + 9.0 * std::norm(beta)).epsilon(1e-12));
}

TEST_CASE("quadrature sampling matches coherent-state moments") {
  const cdouble alpha(3.0, 2.0);
  RandomStream rng(401, 0);
  const int n = 100000;
  double sx = 0, sx2 = 0, sp = 0, sp2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_coherent_quadrature(alpha, Quadrature::Position, rng);
    const double p = sample_coherent_quadrature(alpha, Quadrature::Momentum, rng);
    sx += x;
    sx2 += x * x;
    sp += p;
    sp2 += p * p;
  }
  const double mx = sx / n, mp = sp / n;
  const double se = 5.0 * std::sqrt(0.5 / n);
  CHECK(std::abs(mx - std::sqrt(2.0) * 3.0) < se);
  CHECK(std::abs(mp - std::sqrt(2.0) * 2.0) < se);
  CHECK(std::abs(sx2 / n - mx * mx - 0.5) < 0.01);
  CHECK(std::abs(sp2 / n - mp * mp - 0.5) < 0.01);
}

TEST_CASE("alpha reconstruction from identical clones is unbiased") {
  const cdouble alpha(3.0, 2.0);
  const std::size_t n = 100;
  const std::vector<cdouble> clones(n, alpha / std::sqrt(static_cast<double>(n)));
  RandomStream rng(402, 0);
  const int experiments = 20000;
  double sre = 0, sim = 0, sre2 = 0, sim2 = 0;
  double predicted_std = 0;
  for (int e = 0; e < experiments; ++e) {
    const AlphaEstimate est = estimate_alpha(clones, rng);
    CHECK(est.n_used == n);
    predicted_std = est.std_per_component;
    sre += est.alpha_hat.real();
    sim += est.alpha_hat.imag();
    sre2 += est.alpha_hat.real() * est.alpha_hat.real();
    sim2 += est.alpha_hat.imag() * est.alpha_hat.imag();
  }
  // even split: std per component is exactly 1/sqrt2
  CHECK(predicted_std == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  const double mre = sre / experiments, mim = sim / experiments;
  const double band = 5.0 * predicted_std / std::sqrt(static_cast<double>(experiments));
  CHECK(std::abs(mre - 3.0) < band);
  CHECK(std::abs(mim - 2.0) < band);
  CHECK(std::sqrt(sre2 / experiments - mre * mre) ==
        doctest::Approx(predicted_std).epsilon(0.03));
  CHECK(std::sqrt(sim2 / experiments - mim * mim) ==
        doctest::Approx(predicted_std).epsilon(0.03));

  RandomStream rng2(402, 1);
  CHECK_THROWS_AS(estimate_alpha({alpha}, rng2), std::invalid_argument);
  CHECK_THROWS_AS(estimate_alpha({alpha, alpha * 1.5}, rng2), std::invalid_argument);
}

TEST_CASE("qubit cloning fidelity formulas") {
  CHECK(qubit_fidelity(1, 2) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(qubit_fidelity(2, 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(qubit_fidelity_limit(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(qubit_fidelity_limit(3) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(std::abs(qubit_fidelity(1, 1000000) - 2.0 / 3.0) < 1e-6);
  // more input copies help, more output copies dilute
  CHECK(qubit_fidelity(2, 4) > qubit_fidelity(1, 4));
  CHECK(qubit_fidelity(1, 3) < qubit_fidelity(1, 2));
  CHECK_THROWS_AS(qubit_fidelity(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(qubit_fidelity(3, 2), std::invalid_argument);
}

TEST_CASE("d-level fidelity reduces to the qubit case at d = 2") {
  for (std::size_t n = 1; n <= 20; ++n)
    for (std::size_t m = n; m <= 20; ++m)
      CHECK(std::abs(d_dim_fidelity(n, m, 2) - qubit_fidelity(n, m)) < 1e-12);
  // shrink identity F = eta + (1 - eta)/d
  for (std::size_t d = 2; d <= 7; ++d)
    for (std::size_t n = 1; n <= 5; ++n)
      for (std::size_t m = n; m <= 12; ++m) {
        const double eta = clone_shrink_factor(n, m, d);
        CHECK(std::abs(d_dim_fidelity(n, m, d) - (eta + (1.0 - eta) / d)) < 1e-13);
      }
}

TEST_CASE("clone state shrinks toward the maximally mixed state") {
  const std::size_t d = 3;
  CVector v(3);
  v << cdouble(0.6, 0.1), cdouble(0.2, -0.3), cdouble(0.5, 0.4);
  const PureState psi{v};
  const DensityMatrix rho = DensityMatrix::from_pure(psi);
  const DensityMatrix clone = d_dim_clone_state(rho, 2, 5, d);
  const double eta = clone_shrink_factor(2, 5, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const cdouble expect = eta * rho.entry(i, j) + (i == j ? (1.0 - eta) / d : 0.0);
      CHECK(std::abs(clone.entry(i, j) - expect) < 1e-13);
    }
  // overlap with the input equals the closed-form fidelity
  cdouble fid = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      fid += rho.entry(j, i) * clone.entry(i, j);
  CHECK(fid.real() == doctest::Approx(d_dim_fidelity(2, 5, d)).epsilon(1e-13));
  CHECK(std::abs(fid.imag()) < 1e-13);

  CHECK_THROWS_AS(d_dim_clone_state(rho, 2, 5, 4), std::invalid_argument);
}

TEST_CASE("expectation values on a clone scale as (2m+1)/(3m)") {
  for (std::size_t m : {std::size_t{1}, std::size_t{2}, std::size_t{5}, std::size_t{40}}) {
    const double expect = (2.0 * static_cast<double>(m) + 1.0) / (3.0 * static_cast<double>(m));
    CHECK(qubit_clone_expectation_factor(m) == doctest::Approx(expect).epsilon(1e-15));
  }
  CHECK(std::abs(qubit_clone_expectation_factor(1000000) - 2.0 / 3.0) < 1e-6);
}

TEST_CASE("coherent-state cloning bound and added noise") {
  CHECK(coherent_fidelity_bound(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(coherent_fidelity_bound(1, 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(std::abs(coherent_fidelity_bound(1, 1000000) - 0.5) < 1e-6);

  const cdouble alpha(3.0, 2.0);
  const CoherentCloneMoments m2 = coherent_clone_moments(alpha, 1, 2);
  CHECK(m2.sigma2 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m2.mean_x == doctest::Approx(std::sqrt(2.0) * 3.0).epsilon(1e-15));
  CHECK(m2.mean_p == doctest::Approx(std::sqrt(2.0) * 2.0).epsilon(1e-15));
  CHECK(m2.var_x == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(coherent_clone_moments(alpha, 1, 10).var_x == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(coherent_clone_moments(alpha, 1, 100).var_x == doctest::Approx(1.49).epsilon(1e-15));
  // n = m: nothing is added
  CHECK(coherent_clone_moments(alpha, 3, 3).sigma2 == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("sampled clone labels carry exactly the added noise") {
  const cdouble alpha(3.0, 2.0);
  RandomStream rng(403, 0);
  CHECK(sample_coherent_clone(alpha, 2, 2, rng) == alpha);

  const int n = 100000;
  double sre = 0, sre2 = 0;
  for (int i = 0; i < n; ++i) {
    const cdouble label = sample_coherent_clone(alpha, 1, 2, rng);
    sre += label.real();
    sre2 += label.real() * label.real();
  }
  const double mean = sre / n;
  const double var = sre2 / n - mean * mean;
  // label spread per real component is sigma^2/2 = 0.25
  CHECK(std::abs(mean - 3.0) < 5.0 * std::sqrt(0.25 / n));
  CHECK(std::abs(var - 0.25) < 0.01);
}
