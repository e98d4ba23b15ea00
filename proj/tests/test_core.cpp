#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "qmeter/core.hpp"
#include "qmeter/random.hpp"

using namespace qmeter;

namespace {

CMatrix random_hermitian(std::size_t d, RandomStream& rng) {
  CMatrix a(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) a(r, c) = cdouble(rng.normal(), rng.normal());
  return CMatrix(0.5 * (a + a.adjoint()));
}

// Independent matrix exponential: plain Taylor series of exp(-i H t), which
// converges fast for the small norms used here.
CMatrix taylor_exp_minus_iht(const CMatrix& h, double t) {
  const Eigen::Index d = h.rows();
  CMatrix result = CMatrix::Identity(d, d);
  CMatrix term = CMatrix::Identity(d, d);
  const CMatrix a = cdouble(0.0, -t) * h;
  for (int k = 1; k <= 60; ++k) {
    term = CMatrix(term * a / static_cast<double>(k));
    result += term;
  }
  return result;
}

// Index-sum partial trace, written independently of the library version.
CMatrix partial_trace_oracle(const CMatrix& joint, std::size_t da, std::size_t db,
                             bool keep_first) {
  const std::size_t dk = keep_first ? da : db;
  CMatrix out = CMatrix::Zero(dk, dk);
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j < dk; ++j) {
      cdouble acc = 0.0;
      const std::size_t dt = keep_first ? db : da;
      for (std::size_t m = 0; m < dt; ++m) {
        const std::size_t r = keep_first ? i * db + m : m * db + i;
        const std::size_t c = keep_first ? j * db + m : m * db + j;
        acc += joint(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
    }
  return out;
}

}  // namespace

TEST_CASE("pure states normalize and validate") {
  const PureState psi = PureState::from_reals({3.0, 4.0});
  CHECK(psi.dim() == 2);
  CHECK(psi.probabilities()[0] == doctest::Approx(0.36).epsilon(1e-14));
  CHECK(psi.probabilities()[1] == doctest::Approx(0.64).epsilon(1e-14));

  CVector one(1);
  one << 1.0;
  CHECK_THROWS_AS(PureState{one}, std::invalid_argument);

  CVector zero2 = CVector::Zero(2);
  CHECK_THROWS_AS(PureState{zero2}, std::invalid_argument);
}

TEST_CASE("observables expose spectrum statistics") {
  const Observable s({1.0, -1.0});
  CHECK(s.dim() == 2);
  CHECK(s.min_eigenvalue() == -1.0);
  CHECK(s.max_eigenvalue() == 1.0);
  CHECK_THROWS_AS(Observable({1.0, 1.0}), std::invalid_argument);

  // <S> = 0.3 - 0.7 = -0.4, <S^2> = 1, spread = sqrt(1 - 0.16)
  const std::vector<double> w{0.3, 0.7};
  CHECK(s.spread(w) == doctest::Approx(std::sqrt(0.84)).epsilon(1e-14));
}

TEST_CASE("expectation and variance against hand values") {
  const PureState psi = PureState::from_reals({std::sqrt(0.3), std::sqrt(0.7)});
  const Observable s({1.0, -1.0});
  CHECK(expectation(psi, s) == doctest::Approx(-0.4).epsilon(1e-14));
  CHECK(observable_variance(psi, s) == doctest::Approx(0.84).epsilon(1e-14));
}

TEST_CASE("hermitian operators validate and give real expectations") {
  CMatrix sx(2, 2);
  sx << 0.0, 1.0, 1.0, 0.0;
  const HermitianOperator op(sx);
  const PureState psi = PureState::from_reals({std::sqrt(0.3), std::sqrt(0.7)});
  // <sigma_x> = 2 sqrt(0.3 * 0.7)
  CHECK(expectation(psi, op) == doctest::Approx(2.0 * std::sqrt(0.21)).epsilon(1e-14));

  CMatrix bad(2, 2);
  bad << 0.0, 1.0, 2.0, 0.0;
  CHECK_THROWS_AS(HermitianOperator{bad}, std::invalid_argument);
}

TEST_CASE("matrix exponential agrees with a Taylor-series oracle") {
  RandomStream rng(11, 0);
  for (int rep = 0; rep < 5; ++rep) {
    const CMatrix h = random_hermitian(3, rng);
    const HermitianOperator op(h);
    const double t = 0.7;
    const CMatrix u = matrix_exponential_evolve(op, t);
    const CMatrix ref = taylor_exp_minus_iht(h, t);
    CHECK((u - ref).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((u * u.adjoint() - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("evolve applies a pure phase to eigenstates") {
  CMatrix h(2, 2);
  h << 2.0, 0.0, 0.0, -1.0;
  const HermitianOperator op(h);
  CVector e0(2);
  e0 << 1.0, 0.0;
  const CVector out = evolve(op, 0.5, e0);
  const cdouble expected = std::exp(cdouble(0.0, -2.0 * 0.5));
  CHECK(std::abs(out(0) - expected) < 1e-14);
  CHECK(std::abs(out(1)) < 1e-14);
}

TEST_CASE("density matrices validate and report purity") {
  const PureState psi = PureState::from_reals({std::sqrt(0.3), std::sqrt(0.7)});
  const DensityMatrix rho = DensityMatrix::from_pure(psi);
  CHECK(rho.purity() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(rho.entry(0, 1) - cdouble(std::sqrt(0.21), 0.0)) < 1e-14);

  CMatrix not_trace_one = CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityMatrix{not_trace_one}, std::invalid_argument);

  CMatrix negative(2, 2);
  negative << 1.5, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(DensityMatrix{negative}, std::invalid_argument);
}

TEST_CASE("partial trace matches the index-sum oracle") {
  RandomStream rng(13, 0);
  const std::size_t da = 2, db = 3;
  // random joint density: normalized Gram matrix, guaranteed positive
  CMatrix g(da * db, da * db);
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    for (Eigen::Index c = 0; c < g.cols(); ++c) g(r, c) = cdouble(rng.normal(), rng.normal());
  CMatrix joint = CMatrix(g * g.adjoint());
  joint /= joint.trace();

  for (bool keep_first : {true, false}) {
    const CMatrix got = partial_trace(joint, da, db, keep_first);
    const CMatrix want = partial_trace_oracle(joint, da, db, keep_first);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(std::abs(got.trace() - cdouble(1.0, 0.0)) < 1e-13);
  }
}

TEST_CASE("partial trace of a maximally entangled pair is maximally mixed") {
  CVector bell(4);
  bell << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
  const CMatrix joint = bell * bell.adjoint();
  const CMatrix reduced = partial_trace(joint, 2, 2, true);
  CHECK((reduced - 0.5 * CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
}
