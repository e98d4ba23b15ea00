#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "qmeter/core.hpp"
#include "qmeter/ensemble.hpp"
#include "qmeter/random.hpp"
#include "qmeter/weak.hpp"

// Times the weak-measurement ensemble on the serial reference path
// (workers = 1) and on the OpenMP path, and checks that both produce the same
// doubles bit for bit — each trajectory is a pure function of its own random
// stream, so the schedule must not matter.

int main(int argc, char** argv) {
  const std::size_t trajectories = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 4000;
  const std::size_t steps = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 400;

  const qmeter::PureState psi =
      qmeter::PureState::from_reals({std::sqrt(0.3), std::sqrt(0.7)});
  const qmeter::Observable s({1.0, -1.0});
  const double delta_p = 10.0;

  const auto run = [&](int workers, std::vector<double>& out) {
    out.assign(trajectories, 0.0);
    const auto t0 = std::chrono::steady_clock::now();
    qmeter::parallel_for_index(trajectories, workers, [&](std::size_t i) {
      qmeter::RandomStream rng(42, i);
      out[i] = qmeter::run_weak_trajectory(psi, s, delta_p, steps, rng,
                                           qmeter::WeakRecord::None)
                   .mean_outcome;
    });
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  std::vector<double> serial_out, parallel_out;
  const double t_serial = run(1, serial_out);
  const double t_parallel = run(0, parallel_out);
  const bool identical = serial_out == parallel_out;

  std::printf("trajectories      %zu\n", trajectories);
  std::printf("steps             %zu\n", steps);
  std::printf("threads           %d\n", omp_get_max_threads());
  std::printf("serial            %.3f s\n", t_serial);
  std::printf("openmp            %.3f s\n", t_parallel);
  std::printf("speedup           %.2fx\n", t_serial / t_parallel);
  std::printf("identical output  %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
