#include "kmsync/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kmsync {

Trajectory integrate(const FullState& u0, const ModelConfig& cfg, double t_end,
                     double dt, int record_stride) {
  if (!(dt > 0.0) || !(t_end > 0.0))
    throw std::invalid_argument("integrate: dt and t_end must be > 0");
  if (record_stride < 1) record_stride = 1;
  const int n = cfg.n;
  if (static_cast<int>(u0.u.size()) != n)
    throw std::invalid_argument("integrate: state has wrong dimension");

  const FrequencyProfile freq = make_frequency_profile(cfg);
  auto rhs = [&](const std::vector<double>& u) {
    return vector_field(FullState{u}, cfg, freq);
  };

  Trajectory traj;
  traj.dt = dt;
  const auto record = [&](double t, const std::vector<double>& u) {
    traj.times.push_back(t);
    std::vector<double> row(n);
    for (int i = 0; i < n; ++i) row[i] = wrap_angle(u[i]);
    traj.states.push_back(std::move(row));
  };

  std::vector<double> u = u0.u;
  std::vector<double> tmp(n);
  record(0.0, u);

  const long long steps = static_cast<long long>(std::ceil(t_end / dt - 1e-12));
  for (long long s = 1; s <= steps; ++s) {
    const double step = (s == steps) ? t_end - dt * (steps - 1) : dt;
    const auto k1 = rhs(u);
    for (int i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * step * k1[i];
    const auto k2 = rhs(tmp);
    for (int i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * step * k2[i];
    const auto k3 = rhs(tmp);
    for (int i = 0; i < n; ++i) tmp[i] = u[i] + step * k3[i];
    const auto k4 = rhs(tmp);
    for (int i = 0; i < n; ++i)
      u[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    for (double x : u)
      if (!std::isfinite(x))
        throw std::runtime_error("integrate: non-finite state at t = " +
                                 std::to_string(dt * s));
    if (s % record_stride == 0 || s == steps) record(dt * s, u);
  }
  return traj;
}

std::vector<double> disturbance_profile(int n, double delta) {
  std::vector<double> p(n);
  double sq = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double x = (i - 0.5) / n;
    p[i - 1] = std::cos(kTwoPi * x) + 0.5 * std::sin(2.0 * kTwoPi * x);
    sq += p[i - 1] * p[i - 1];
  }
  const double norm = std::sqrt(sq / n);
  for (double& v : p) v *= delta / norm;
  return p;
}

std::vector<ConvergenceRow> convergence_experiment(const ContinuumSolution& sol,
                                                   const std::vector<int>& n_list,
                                                   double a, double K_over_a,
                                                   double t_end, double delta,
                                                   int rows_per_run) {
  for (std::size_t i = 0; i + 1 < n_list.size(); ++i)
    if (n_list[i] >= n_list[i + 1])
      throw std::invalid_argument("convergence_experiment: n_list must increase");
  std::vector<ConvergenceRow> rows;
  for (int n : n_list) {
    const ModelConfig cfg = ModelConfig::from_ratio(n, K_over_a, a);
    const StepFunctionState target = discretize(sol, n);
    const std::vector<double> p = disturbance_profile(n, delta);
    FullState u0{target.values};
    for (int i = 0; i < n; ++i) u0.u[i] += p[i];

    const double dt = 0.01 / cfg.K;
    const long long steps = static_cast<long long>(std::ceil(t_end / dt));
    const int stride = std::max(1LL, steps / std::max(1, rows_per_run));
    const Trajectory traj = integrate(u0, cfg, t_end, dt, static_cast<int>(stride));
    for (std::size_t k = 0; k < traj.times.size(); ++k)
      rows.push_back(
          {n, traj.times[k], family_distance(StepFunctionState{traj.states[k]}, target)});
  }
  return rows;
}

}  // namespace kmsync
