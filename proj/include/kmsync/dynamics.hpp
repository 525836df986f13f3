#pragma once

#include <string>
#include <vector>

#include "kmsync/continuum.hpp"
#include "kmsync/model.hpp"

namespace kmsync {

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;  // one wrapped row of n angles per time
  double dt = 0.0;
  std::string initial_label;
};

// Classic fixed-step fourth-order Runge-Kutta on the full system. Integration
// runs in lifted (unwrapped) coordinates; only the recorded rows are wrapped.
// Records every record_stride-th step plus the final state. Aborts on a
// non-finite state.
Trajectory integrate(const FullState& u0, const ModelConfig& cfg, double t_end,
                     double dt, int record_stride = 1);

// Deterministic mean-zero disturbance of square-integrable size delta,
// sampled at the cell midpoints (cos 2 pi x + 0.5 sin 4 pi x, normalized).
std::vector<double> disturbance_profile(int n, double delta);

struct ConvergenceRow {
  int n = 0;
  double t = 0.0;
  double distance = 0.0;  // to the discretized stationary family
};

// Integrates the discretized profile for each n with the fixed disturbance
// added, reporting the distance to the stationary family along the way.
// dt = 0.01/K; about `rows_per_run` rows per n.
std::vector<ConvergenceRow> convergence_experiment(const ContinuumSolution& sol,
                                                   const std::vector<int>& n_list,
                                                   double a, double K_over_a,
                                                   double t_end, double delta,
                                                   int rows_per_run = 50);

}  // namespace kmsync
