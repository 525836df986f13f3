#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "kmsync/equilibria.hpp"
#include "kmsync/model.hpp"
#include "oracles.hpp"

using namespace kmsync;

TEST_SUITE("model") {

TEST_CASE("configuration invariants") {
  const ModelConfig cfg(7, 2.0, 0.5);
  CHECK(cfg.n0 == 3);
  CHECK(cfg.nu * cfg.n == doctest::Approx(cfg.a).epsilon(1e-15));
  CHECK(cfg.beta * cfg.K == doctest::Approx(cfg.a).epsilon(1e-15));
  CHECK_THROWS_AS(ModelConfig(4, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelConfig(1, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelConfig(5, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelConfig(5, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("frequency profile is evenly spaced, antisymmetric, mean-free") {
  const ModelConfig cfg(9, 1.7, 1.0);
  const FrequencyProfile f = make_frequency_profile(cfg);
  REQUIRE(f.omegas.size() == 9);
  for (int i = 1; i <= 9; ++i)
    CHECK(f.omegas[i - 1] ==
          doctest::Approx(1.7 * (2.0 * i - 10.0) / 18.0).epsilon(1e-15));
  for (int i = 1; i <= 9; ++i)
    CHECK(f.omegas[i - 1] == doctest::Approx(-f.omegas[9 - i]).epsilon(1e-15));
  CHECK(std::fabs(f.Omega_D) < 1e-16);
}

TEST_CASE("vector field vanishes for identical oscillators without drift") {
  const ModelConfig cfg(5, 0.0, 2.0);
  const FrequencyProfile f = make_frequency_profile(cfg);
  const FullState u{{0.7, 0.7, 0.7, 0.7, 0.7}};
  for (double x : vector_field(u, cfg, f)) CHECK(x == 0.0);
}

TEST_CASE("vector field matches a direct-summation evaluation") {
  const ModelConfig cfg(3, 1.0, 1.0);
  const FrequencyProfile f = make_frequency_profile(cfg);
  const FullState u{{0.1, 0.2, 0.3}};
  const auto got = vector_field(u, cfg, f);
  const auto want = oracles::direct_km_field(u.u, 1.0, 1.0);
  for (int i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
}

TEST_CASE("the locked state of the consistency condition is a fixed point") {
  const ModelConfig cfg = ModelConfig::from_ratio(5, 1.2);
  const FrequencyProfile f = make_frequency_profile(cfg);
  const auto CD = solve_CD(cfg);
  REQUIRE(CD.has_value());
  FullState u;
  u.u.resize(5);
  for (int i = 1; i <= 5; ++i)
    u.u[i - 1] = std::asin(f.omegas[i - 1] / (cfg.K * *CD)) + 0.37;
  for (double x : vector_field(u, cfg, f)) CHECK(std::fabs(x) < 1e-10);
}

TEST_CASE("components of the field always sum to zero") {
  const ModelConfig cfg(7, 1.3, 0.9);
  const FrequencyProfile f = make_frequency_profile(cfg);
  Rng01 rng(42);
  for (int rep = 0; rep < 10; ++rep) {
    FullState u;
    for (int i = 0; i < 7; ++i) u.u.push_back(rng.next_symmetric() * kPi);
    double sum = 0.0;
    for (double x : vector_field(u, cfg, f)) sum += x;
    CHECK(std::fabs(sum) < 1e-13);
  }
}

TEST_CASE("field is invariant under a global phase shift") {
  const ModelConfig cfg(7, 1.0, 1.4);
  const FrequencyProfile f = make_frequency_profile(cfg);
  Rng01 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    FullState u, shifted;
    const double theta = rng.next_symmetric() * kPi;
    for (int i = 0; i < 7; ++i) {
      const double x = rng.next_symmetric() * kPi;
      u.u.push_back(x);
      shifted.u.push_back(x + theta);
    }
    const auto a = vector_field(u, cfg, f);
    const auto b = vector_field(shifted, cfg, f);
    for (int i = 0; i < 7; ++i) CHECK(std::fabs(a[i] - b[i]) < 1e-12);
  }
}

TEST_CASE("reduced field equals pairwise differences of the full field") {
  const ModelConfig cfg(7, 0.8, 1.1);
  const FrequencyProfile f = make_frequency_profile(cfg);
  Rng01 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    ReducedState v;
    for (int i = 0; i < 6; ++i) v.v.push_back(rng.next_symmetric() * kPi);
    const double theta = rng.next_symmetric() * kPi;
    const FullState u = lift(v, theta, cfg);
    const auto full = vector_field(u, cfg, f);
    const auto red = reduced_vector_field(v, cfg);
    for (int i = 1; i <= 6; ++i) {
      const int fi = (i <= 3) ? i : i + 1;
      CHECK(std::fabs(red[i - 1] - (full[fi - 1] - full[3])) < 1e-12);
    }
  }
}

TEST_CASE("reduce then lift recovers the state") {
  const ModelConfig cfg(5, 1.0, 1.0);
  const FullState u{{0.4, -1.2, 2.0, 3.0, -2.9}};
  const ReducedState v = reduce(u, cfg);
  const FullState back = lift(v, u.u[2], cfg);
  for (int i = 0; i < 5; ++i)
    CHECK(wrap_angle(back.u[i] - u.u[i]) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("n=3 reduced equilibrium condition") {
  // v = (-w, w) with sin w (1 + 2 cos w) = a/K is a fixed point
  const double w = 0.4;
  const double beta = std::sin(w) * (1.0 + 2.0 * std::cos(w));
  const ModelConfig cfg(3, 1.0, 1.0 / beta);
  const auto f = reduced_vector_field(ReducedState{{-w, w}}, cfg);
  CHECK(std::fabs(f[0]) < 1e-14);
  CHECK(std::fabs(f[1]) < 1e-14);
}

TEST_CASE("reduced field rejects wrong dimensions") {
  const ModelConfig cfg(5, 1.0, 1.0);
  CHECK_THROWS_AS(reduced_vector_field(ReducedState{{0.1, 0.2}}, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(vector_field(FullState{{0.1}}, cfg, make_frequency_profile(cfg)),
                  std::invalid_argument);
}

TEST_CASE("Jacobian at the aligned state") {
  const ModelConfig cfg(5, 1.0, 1.3);
  const Matrix A = jacobian(ReducedState{{0, 0, 0, 0}}, cfg);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(A(i, j) ==
            doctest::Approx(cfg.K / 5.0 * ((i == j) ? (1.0 - 5.0) : 1.0)).epsilon(1e-15));
  const auto es = jacobi_eigensystem(A);
  CHECK(std::fabs(es.values[4]) < 1e-12);
  for (int k = 0; k < 4; ++k) CHECK(es.values[k] == doctest::Approx(-cfg.K).epsilon(1e-12));
}

TEST_CASE("Jacobian is exactly symmetric with zero row sums") {
  const ModelConfig cfg(9, 1.0, 0.7);
  Rng01 rng(3);
  for (int rep = 0; rep < 5; ++rep) {
    ReducedState v;
    for (int i = 0; i < 8; ++i) v.v.push_back(rng.next_symmetric() * kPi);
    const Matrix A = jacobian(v, cfg);
    CHECK(max_asymmetry(A) == 0.0);
    for (int i = 0; i < 9; ++i) {
      double row = 0.0;
      for (int j = 0; j < 9; ++j) row += A(i, j);
      CHECK(std::fabs(row) < 1e-15);
    }
  }
}

TEST_CASE("Jacobian matches central differences of the full field") {
  const ModelConfig cfg(7, 1.1, 0.8);
  const FrequencyProfile freq = make_frequency_profile(cfg);
  Rng01 rng(19);
  ReducedState v;
  for (int i = 0; i < 6; ++i) v.v.push_back(rng.next_symmetric() * 2.5);
  const Matrix A = jacobian(v, cfg);
  const FullState u = lift(v, 0.0, cfg);
  const double h = 1e-6;
  for (int j = 0; j < 7; ++j) {
    FullState up = u, um = u;
    up.u[j] += h;
    um.u[j] -= h;
    const auto fp = vector_field(up, cfg, freq);
    const auto fm = vector_field(um, cfg, freq);
    for (int i = 0; i < 7; ++i)
      CHECK(std::fabs((fp[i] - fm[i]) / (2.0 * h) - A(i, j)) < 1e-6);
  }
}

}  // TEST_SUITE
