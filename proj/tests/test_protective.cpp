#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "qmeter/protective.hpp"

using namespace qmeter;

namespace {
const PureState kPsi = PureState::from_reals({std::sqrt(0.3), std::sqrt(0.7)});
const Observable kS({1.0, -1.0});
}  // namespace

TEST_CASE("branch probabilities follow the 1/T^2 failure law") {
  ProtectiveConfig cfg;
  cfg.t_total = 10.0;
  const std::array<double, 4> p = protective_branch_probabilities(cfg);
  CHECK(p[0] == doctest::Approx(0.97).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(p[2] == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(p[3] == doctest::Approx(0.01).epsilon(1e-14));

  cfg.t_total = 1.5;  // 3/T^2 > 1: no valid branch split
  CHECK_THROWS_AS(protective_branch_probabilities(cfg), std::invalid_argument);
}

TEST_CASE("ideal pointer shift and perturbed eigenvalue") {
  CHECK(ideal_pointer_shift(kPsi, kS, 2.0) == doctest::Approx(2.0 - 0.4).epsilon(1e-14));
  CHECK(perturbed_eigenvalue(1.5, 0.2, -0.4, 10.0) ==
        doctest::Approx(1.5 + 0.2 * (-0.4) / 10.0).epsilon(1e-14));
}

TEST_CASE("branch sampling: readings, states, and frequencies") {
  ProtectiveConfig cfg;
  cfg.t_total = 5.0;  // failure branches at 4% each: enough statistics
  cfg.r0 = 2.0;
  RandomStream rng(301, 0);
  const int n = 200000;
  std::array<int, 4> counts{0, 0, 0, 0};
  const double protected_reading = ideal_pointer_shift(kPsi, kS, cfg.r0);
  // the qubit orthogonal state swaps the Born weights: <S>_perp = +0.4
  const double flipped_reading = cfg.r0 + 0.4;

  for (int i = 0; i < n; ++i) {
    const ProtectiveBranch b = sample_protective_branch(kPsi, kS, cfg, rng);
    ++counts[static_cast<std::size_t>(static_cast<int>(b.kind) - 1)];
    cdouble ip = 0.0;
    for (std::size_t k = 0; k < 2; ++k)
      ip += std::conj(kPsi.amplitude(k)) * b.post_state.amplitude(k);
    switch (b.kind) {
      case BranchKind::ProtectedCorrectPointer:
        CHECK(b.pointer_reading == doctest::Approx(protected_reading).epsilon(1e-14));
        CHECK(std::abs(ip) == doctest::Approx(1.0).epsilon(1e-12));
        break;
      case BranchKind::ProtectedRandomPointer:
        CHECK(std::abs(ip) == doctest::Approx(1.0).epsilon(1e-12));
        break;
      case BranchKind::CollapsedOrthoPointer:
        CHECK(b.pointer_reading == doctest::Approx(flipped_reading).epsilon(1e-12));
        CHECK(std::abs(ip) < 1e-12);
        break;
      case BranchKind::CollapsedRandomPointer:
        CHECK(std::abs(ip) < 1e-12);
        break;
    }
    if (b.kind == BranchKind::ProtectedRandomPointer ||
        b.kind == BranchKind::CollapsedRandomPointer) {
      CHECK(b.pointer_reading >= cfg.r0 + kS.min_eigenvalue());
      CHECK(b.pointer_reading <= cfg.r0 + kS.max_eigenvalue());
    }
  }

  const std::array<double, 4> p = protective_branch_probabilities(cfg);
  for (std::size_t k = 0; k < 4; ++k) {
    const double f = counts[k] / static_cast<double>(n);
    const double se = std::sqrt(p[k] * (1 - p[k]) / n);
    CHECK(std::abs(f - p[k]) < 5 * se);
  }
}

TEST_CASE("impulsive meter unitary flips the pointer against the up state") {
  const Eigen::Matrix4cd u = two_qubit_interaction_unitary(7.0);
  // basis |up d_up>, |up d_down>, |down d_up>, |down d_down>
  Eigen::Vector4cd up_ddown = Eigen::Vector4cd::Zero();
  up_ddown(1) = 1.0;
  Eigen::Vector4cd out = u * up_ddown;
  CHECK(std::abs(out(0) - cdouble(1.0, 0.0)) < 1e-10);  // -> |up d_up>, phase-free
  CHECK(out.tail<3>().cwiseAbs().maxCoeff() < 1e-10);

  Eigen::Vector4cd down_ddown = Eigen::Vector4cd::Zero();
  down_ddown(3) = 1.0;
  out = u * down_ddown;
  CHECK(std::abs(out(3) - cdouble(1.0, 0.0)) < 1e-10);  // fixed
  CHECK(out.head<3>().cwiseAbs().maxCoeff() < 1e-10);

  CHECK((u * u.adjoint() - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((two_qubit_interaction_unitary(0.5) - u).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(two_qubit_interaction_unitary(0.0), std::invalid_argument);
}

TEST_CASE("shaped-pulse evolution: frozen failure rates and pointer angles") {
  const cdouble a(1.0 / std::sqrt(2.0), 0.0);
  const cdouble b = a;
  const TwoQubitPulse pulse{};  // gap 1, ramp 10, substeps 256

  const TwoQubitResult r10 = evolve_two_qubit_protective(a, b, 10.0, pulse);
  CHECK(r10.p_fail == doctest::Approx(1.149071689018e-02).epsilon(1e-9));
  CHECK(r10.pointer_angle == doctest::Approx(0.888120472253).epsilon(1e-9));
  CHECK(r10.p_protect + r10.p_fail == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r10.joint_state.norm() == doctest::Approx(1.0).epsilon(1e-12));

  const TwoQubitResult r100 = evolve_two_qubit_protective(a, b, 100.0, pulse);
  CHECK(r100.p_fail == doctest::Approx(1.287750224915e-04).epsilon(1e-9));
  CHECK(r100.pointer_angle == doctest::Approx(1.515428689161).epsilon(1e-9));

  // longer protection -> smaller failure, pointer angle -> pi |alpha|^2
  CHECK(r100.p_fail < r10.p_fail);
  CHECK(std::abs(r100.pointer_angle - std::numbers::pi / 2.0) <
        std::abs(r10.pointer_angle - std::numbers::pi / 2.0));
}

TEST_CASE("an eigenstate of the protection Hamiltonian never fails") {
  // alpha = 1: the system is exactly the protected eigenstate, so it never
  // leaves it; the meter turns by pi * integral g dt = pi (1 - ramp/(2T)).
  const TwoQubitPulse pulse{};
  const double t_total = 50.0;
  const TwoQubitResult r = evolve_two_qubit_protective(1.0, 0.0, t_total, pulse);
  CHECK(r.p_fail < 1e-10);
  // the ramp is integrated by a midpoint rule, so allow its ~1e-6 error
  const double turned = std::numbers::pi * (1.0 - pulse.ramp / (2.0 * t_total));
  CHECK(r.pointer_angle == doctest::Approx(turned).epsilon(1e-5));

  // alpha = 0: the coupling projects on |up>, so nothing moves at all
  const TwoQubitResult r0 = evolve_two_qubit_protective(0.0, 1.0, t_total, pulse);
  CHECK(r0.p_fail < 1e-10);
  // acos has infinite slope at 1, so exact zero picks up ~sqrt(eps) noise
  CHECK(std::abs(r0.pointer_angle) < 1e-6);
}

TEST_CASE("failed-branch pointer state is an equal-weight x eigenstate") {
  const PointerXState x = failed_branch_pointer_state();
  CHECK(std::norm(x.coefficients(0)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::norm(x.coefficients(1)) == doctest::Approx(0.5).epsilon(1e-14));
  // the two labelings are orthogonal
  const cdouble ip = std::conj(x.coefficients(0)) * x.alternate_coefficients(0) +
                     std::conj(x.coefficients(1)) * x.alternate_coefficients(1);
  CHECK(std::abs(ip) < 1e-14);
}
