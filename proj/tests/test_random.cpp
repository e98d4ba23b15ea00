#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qmeter/ensemble.hpp"
#include "qmeter/random.hpp"

using qmeter::RandomStream;

TEST_CASE("random stream is deterministic per (seed, stream)") {
  RandomStream a(123, 7);
  RandomStream b(123, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct streams from one seed do not coincide") {
  RandomStream a(123, 0);
  RandomStream b(123, 1);
  int same = 0;
  for (int i = 0; i < 1000; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  CHECK(same == 0);

  RandomStream c(123, 0);
  RandomStream d(124, 0);
  same = 0;
  for (int i = 0; i < 1000; ++i)
    if (c.next_u64() == d.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("uniform() lands in [0, 1) with the right first moments") {
  RandomStream rng(2024, 0);
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0, lo = 1.0, hi = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    sum += u;
    sum2 += u * u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  // mean 1/2 (se ~ 0.0009), variance 1/12
  CHECK(std::abs(mean - 0.5) < 5.0 / std::sqrt(12.0 * n));
  CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("uniform(lo, hi) stays inside its interval") {
  RandomStream rng(5, 3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform(-2.5, 4.0);
    CHECK(u >= -2.5);
    CHECK(u < 4.0);
  }
}

TEST_CASE("normal() has standard moments and symmetric tails") {
  RandomStream rng(99, 0);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  int above = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
    if (z > 0) ++above;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 0.02);
  CHECK(std::abs(above / static_cast<double>(n) - 0.5) < 0.01);
}

TEST_CASE("normal(mean, sd) rescales") {
  RandomStream rng(99, 1);
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal(-3.0, 0.25);
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean + 3.0) < 5.0 * 0.25 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 0.0625) < 0.002);
}

TEST_CASE("categorical draws follow the weights") {
  RandomStream rng(7, 0);
  const std::vector<double> w{0.2, 0.3, 0.5};
  const int n = 100000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < n; ++i) ++counts[rng.categorical(w)];
  for (std::size_t k = 0; k < 3; ++k) {
    const double f = counts[k] / static_cast<double>(n);
    const double se = std::sqrt(w[k] * (1 - w[k]) / n);
    CHECK(std::abs(f - w[k]) < 5 * se);
  }
}

TEST_CASE("categorical never picks a zero-weight bin ahead of support") {
  RandomStream rng(7, 1);
  const std::vector<double> w{0.0, 0.0, 1.0};
  for (int i = 0; i < 1000; ++i) CHECK(rng.categorical(w) == 2);
}

TEST_CASE("parallel_for_index matches the serial path at any worker count") {
  const std::size_t n = 997;
  const auto fill = [&](int workers) {
    std::vector<double> out(n);
    qmeter::parallel_for_index(n, workers, [&](std::size_t i) {
      RandomStream rng(31, i);
      out[i] = rng.normal() + rng.uniform();
    });
    return out;
  };
  const std::vector<double> serial = fill(1);
  CHECK(fill(2) == serial);
  CHECK(fill(5) == serial);
  CHECK(fill(0) == serial);  // library-default thread count
}

TEST_CASE("ordered_sum reduces left to right") {
  const std::vector<double> xs{1e16, 1.0, -1e16, 1.0};
  // left-to-right: (1e16 + 1) loses the 1, so the total is exactly 1.0
  CHECK(qmeter::ordered_sum(xs) == 1.0);
}
