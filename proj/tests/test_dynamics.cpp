#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "kmsync/dynamics.hpp"
#include "kmsync/stability.hpp"
#include "oracles.hpp"

using namespace kmsync;

TEST_SUITE("dynamics") {

TEST_CASE("argument validation") {
  const ModelConfig cfg(3, 1.0, 1.0);
  const FullState u{{0.0, 0.1, 0.2}};
  CHECK_THROWS_AS(integrate(u, cfg, -1.0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(integrate(u, cfg, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate(FullState{{0.0}}, cfg, 1.0, 0.01), std::invalid_argument);
}

TEST_CASE("mean phase never drifts on a bounded run") {
  const ModelConfig cfg = ModelConfig::from_ratio(5, 0.7);
  const auto plus = SignSequence::all_plus(2);
  const auto roots = solve_xi(plus, cfg.beta);
  REQUIRE(!roots.empty());
  const Equilibrium eq = build_equilibrium(plus, roots.front(), cfg);
  FullState u0 = lift(ReducedState{eq.v}, 0.0, cfg);
  u0.u[1] += 0.01;
  u0.u[3] -= 0.01;
  const Trajectory traj = integrate(u0, cfg, 30.0, 0.01, 50);
  REQUIRE(traj.states.size() == traj.times.size());
  for (std::size_t k = 1; k < traj.times.size(); ++k)
    CHECK(traj.times[k] > traj.times[k - 1]);
  double mean0 = 0.0;
  for (double x : traj.states.front()) mean0 += x / 5.0;
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    double mean = 0.0;
    for (double x : traj.states[k]) mean += x / 5.0;
    CHECK(std::fabs(mean - mean0) < 1e-8 * traj.times[k] + 1e-12);
  }
}

TEST_CASE("identical oscillators relax to their arithmetic mean") {
  const ModelConfig cfg(5, 0.0, 2.0);
  const FullState u0{{0.9, -0.6, 0.3, -0.2, 0.1}};
  double mean = 0.0;
  for (double x : u0.u) mean += x / 5.0;
  const Trajectory traj = integrate(u0, cfg, 30.0, 0.005, 1000);
  for (double x : traj.states.back()) CHECK(std::fabs(x - mean) < 1e-6);
}

TEST_CASE("step halving shows fourth-order accuracy") {
  const ModelConfig cfg(5, 1.0, 1.0);
  const FullState u0{{0.3, -0.1, 0.7, 0.2, -0.5}};
  auto final_state = [&](double dt) {
    return integrate(u0, cfg, 2.0, dt, 1 << 20).states.back();
  };
  const auto a = final_state(0.02);
  const auto b = final_state(0.01);
  const auto c = final_state(0.005);
  double e1 = 0.0, e2 = 0.0;
  for (int i = 0; i < 5; ++i) {
    e1 = std::max(e1, std::fabs(a[i] - b[i]));
    e2 = std::max(e2, std::fabs(b[i] - c[i]));
  }
  const double order = std::log2(e1 / e2);
  CHECK(order > 3.5);
  CHECK(order < 4.5);
}

TEST_CASE("disturbance profile has the requested size and zero mean") {
  for (int n : {5, 23}) {
    const auto p = disturbance_profile(n, 0.05);
    double sq = 0.0, mean = 0.0;
    for (double v : p) {
      sq += v * v;
      mean += v / n;
    }
    CHECK(std::sqrt(sq / n) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(std::fabs(mean) < 1e-12);
  }
}

TEST_CASE("undisturbed discretization stays within its consistency error") {
  const int n = 11;
  const ModelConfig cfg = ModelConfig::from_ratio(n, 1.0);
  const ContinuumSolution sol = continuous_solution(cfg.beta);
  const StepFunctionState target = discretize(sol, n);

  // the nearest true locked state measures the discretization residual
  const auto plus = SignSequence::all_plus(cfg.n0);
  const auto roots = solve_xi(plus, cfg.beta);
  REQUIRE(!roots.empty());
  const Equilibrium eq = build_equilibrium(plus, roots.front(), cfg);
  const FullState exact = lift(ReducedState{eq.v}, 0.0, cfg);
  const double consistency = family_distance(StepFunctionState{exact.u}, target);
  MESSAGE("n=11 discretization consistency error: ", consistency);

  const auto rows = convergence_experiment(sol, {n}, 1.0, 1.0, 30.0, 0.0);
  for (const auto& r : rows)
    CHECK(r.distance <= std::max(1e-8, 1.5 * consistency));
}

TEST_CASE("disturbed states contract onto the stable family") {
  const ContinuumSolution sol = continuous_solution(1.0);
  const double delta = 0.05;
  const auto rows = convergence_experiment(sol, {11, 23, 47}, 1.0, 1.0, 50.0, delta);
  double final_11 = 1e300, final_47 = 1e300;
  for (const auto& r : rows) {
    if (r.t >= 50.0 - 1e-9) {
      CHECK(r.distance < delta);
      if (r.n == 11) final_11 = r.distance;
      if (r.n == 47) final_47 = r.distance;
    }
  }
  CHECK(final_47 < final_11);  // residual scale shrinks with n
}

TEST_CASE("the all-reflected branch: unstable spectra, stable continuum image") {
  // The mirror profile pi + U is the rotation-by-pi member of the continuous
  // family, so in the rotation quotient its neighborhood is attracting even
  // though every finite-n all-reflected equilibrium carries positive
  // eigenvalues. Both halves are checked mechanically.
  const ContinuumSolution mirror = mirror_solution(1.0);
  double prev_gap = 1e300;
  for (int n : {11, 23, 47}) {
    const ModelConfig cfg = ModelConfig::from_ratio(n, 1.0);
    const auto minus = SignSequence::all_minus(cfg.n0);
    const auto roots = solve_xi(minus, cfg.beta);
    REQUIRE(!roots.empty());
    const Equilibrium eq = build_equilibrium(minus, roots.front(), cfg);
    CHECK(eq.c_hat < 0.0);
    CHECK(stability_at(eq, cfg).l_plus >= 1);

    // the equilibrium approaches the discretized mirror profile (the order
    // parameter carries an O(1/n0) finite-size shift, so expect slow decay),
    // and the two continuum families coincide once rotation is quotiented out
    const FullState lifted = lift(ReducedState{eq.v}, 0.0, cfg);
    const StepFunctionState mdisc = discretize(mirror, n);
    const double gap = family_distance(StepFunctionState{lifted.u}, mdisc);
    CHECK(gap < prev_gap);
    prev_gap = gap;
    const StepFunctionState sdisc = discretize(continuous_solution(1.0), n);
    CHECK(family_distance(mdisc, sdisc) < 1e-10);
  }
  // a disturbed discretization therefore relaxes onto the family
  const auto rows = convergence_experiment(mirror, {11}, 1.0, 1.0, 50.0, 0.05);
  double last = 1e300;
  for (const auto& r : rows)
    if (r.t >= 50.0 - 1e-9) last = r.distance;
  CHECK(last < 0.05);
}

TEST_CASE("a single reflected oscillator: unstable at every n, stable in the limit") {
  // finite networks reject the state while its continuum image is the stable
  // family (the flip set shrinks to measure zero)
  const double ratio = 1.0;
  double prev_gap = 1e300;
  for (int n : {11, 23, 47}) {
    const int n0 = (n - 1) / 2;
    std::vector<int> signs(2 * n0, 1);
    signs[0] = -1;
    const SignSequence sigma{signs};

    const ModelConfig cfg = ModelConfig::from_ratio(n, ratio);
    const auto roots = solve_xi(sigma, cfg.beta);
    REQUIRE(!roots.empty());
    const Equilibrium eq = build_equilibrium(sigma, roots.front(), cfg);
    CHECK(stability_at(eq, cfg).l_plus >= 1);

    double measure = 0.0;
    for (const auto& f : sigma_flip_set(sigma, n)) measure += f.measure();
    CHECK(measure <= 2.0 / n);

    const StepFunctionState stable_disc = discretize(continuous_solution(cfg.beta), n);
    const FullState lifted = lift(ReducedState{eq.v}, 0.0, cfg);
    const double gap = family_distance(StepFunctionState{lifted.u}, stable_disc);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

}  // TEST_SUITE
