#include <cmath>
#include <vector>

#include "doctest.h"
#include "qmeter/projective.hpp"

using namespace qmeter;

namespace {
const PureState kPsi = PureState::from_reals({std::sqrt(0.3), std::sqrt(0.7)});
const Observable kS({1.0, -1.0});
}  // namespace

TEST_CASE("single strong measurements follow the Born rule") {
  RandomStream rng(101, 0);
  const int n = 100000;
  int hits0 = 0;
  for (int i = 0; i < n; ++i) {
    const StrongOutcome o = sample_strong(kPsi, kS, rng);
    if (o.index == 0) {
      ++hits0;
      CHECK(o.value == 1.0);
    } else {
      CHECK(o.value == -1.0);
    }
    // post state is the eigenstate that was read off
    CHECK(std::abs(o.post.amplitude(o.index)) == doctest::Approx(1.0).epsilon(1e-14));
  }
  const double f = hits0 / static_cast<double>(n);
  CHECK(std::abs(f - 0.3) < 5 * std::sqrt(0.3 * 0.7 / n));
}

TEST_CASE("repeated strong measurement repeats the first outcome verbatim") {
  RandomStream rng(102, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const StrongTrajectory traj = run_strong_trajectory(kPsi, kS, 25, rng);
    REQUIRE(traj.outcomes.size() == 25);
    for (double o : traj.outcomes) CHECK(o == traj.outcomes.front());
    CHECK(traj.mean == traj.outcomes.front());
    CHECK(kS.eigenvalue(traj.collapsed_index) == traj.outcomes.front());
  }
}

TEST_CASE("joint density of an outcome record") {
  // all outcomes equal s_i: weight |alpha_i|^2
  CHECK(strong_joint_density({1.0, 1.0, 1.0}, kPsi, kS) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(strong_joint_density({-1.0, -1.0}, kPsi, kS) == doctest::Approx(0.7).epsilon(1e-14));
  // mixed records are impossible
  CHECK(strong_joint_density({1.0, -1.0}, kPsi, kS) == 0.0);
  // values outside the spectrum are a caller error, not probability zero
  CHECK_THROWS_AS(strong_joint_density({0.5}, kPsi, kS), std::invalid_argument);
}

TEST_CASE("mean distribution is a pair of Born-weighted point masses") {
  const std::vector<PointMass> dist = strong_mean_distribution(kPsi, kS);
  REQUIRE(dist.size() == 2);
  CHECK(dist[0].value == 1.0);
  CHECK(dist[0].weight == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(dist[1].value == -1.0);
  CHECK(dist[1].weight == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("eigenstate input collapses to itself with certainty") {
  const PureState up = PureState::from_reals({1.0, 0.0});
  RandomStream rng(103, 0);
  for (int i = 0; i < 100; ++i) {
    const StrongTrajectory traj = run_strong_trajectory(up, kS, 5, rng);
    CHECK(traj.collapsed_index == 0);
    CHECK(traj.mean == 1.0);
  }
}
