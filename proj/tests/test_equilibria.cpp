#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <set>

#include "kmsync/equilibria.hpp"
#include "kmsync/model.hpp"
#include "oracles.hpp"

using namespace kmsync;

TEST_SUITE("equilibria") {

TEST_CASE("sequence enumeration is lexicographic and complete") {
  const auto s1 = enumerate_sequences(1);
  REQUIRE(s1.size() == 4);
  CHECK(s1[0].str() == "--");
  CHECK(s1[1].str() == "-+");
  CHECK(s1[2].str() == "+-");
  CHECK(s1[3].str() == "++");
  CHECK(enumerate_sequences(2).size() == 16);
  CHECK(enumerate_sequences(5).size() == 1024);
  std::set<std::uint64_t> seen;
  for (const auto& s : enumerate_sequences(3)) seen.insert(s.index());
  CHECK(seen.size() == 64);
  CHECK_THROWS_WITH_AS(enumerate_sequences(0), doctest::Contains("[1,12]"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(enumerate_sequences(13), doctest::Contains("[1,12]"),
                       std::invalid_argument);
}

TEST_CASE("sequence parsing reports the bad position") {
  CHECK(SignSequence::from_string("+-++").str() == "+-++");
  CHECK_THROWS_WITH_AS(SignSequence::from_string("+-x+"),
                       doctest::Contains("position 3"), std::invalid_argument);
}

TEST_CASE("chi closed forms at n = 3") {
  const auto plus = SignSequence::all_plus(1);
  const auto minus = SignSequence::all_minus(1);
  for (int k = 0; k <= 20; ++k) {
    const double xi = k / 20.0;
    CHECK(chi_eval(plus, xi) ==
          doctest::Approx(xi + 2.0 * xi * std::sqrt(1.0 - xi * xi)).epsilon(1e-15));
    CHECK(chi_eval(minus, xi) ==
          doctest::Approx(xi - 2.0 * xi * std::sqrt(1.0 - xi * xi)).epsilon(1e-15));
  }
  CHECK(chi_eval(SignSequence::from_string("-+"), 0.37) == doctest::Approx(0.37));
  CHECK_THROWS_AS(chi_eval(plus, 1.5), std::domain_error);
  CHECK_THROWS_AS(chi_eval(plus, -0.1), std::domain_error);
}

TEST_CASE("chi vanishes at the origin for every sequence") {
  for (const auto& s : enumerate_sequences(2)) CHECK(chi_eval(s, 0.0) == 0.0);
}

TEST_CASE("paired form agrees with the defining sum") {
  for (const auto& s : enumerate_sequences(2)) {
    const ChiCurve curve(s);
    for (int k = 0; k <= 40; ++k) {
      const double xi = k / 40.0;
      CHECK(std::fabs(curve.chi(xi) - chi_eval(s, xi)) < 1e-14);
    }
  }
}

TEST_CASE("derivative identity chi' = chi/xi - h xi^2") {
  for (const auto& s : enumerate_sequences(3)) {
    const ChiCurve curve(s);
    for (int k = 1; k <= 9; ++k) {
      const double xi = k / 10.0;
      CHECK(std::fabs(curve.deriv(xi) - (curve.chi(xi) / xi - curve.h(xi) * xi * xi)) <
            1e-12);
    }
  }
}

TEST_CASE("fold of the all-plus branch, exact n = 3 values") {
  const auto ext = chi_extrema(SignSequence::all_plus(1));
  REQUIRE(ext.size() == 1);
  CHECK(ext.front().is_max);
  const double xi0 = std::sqrt((15.0 + std::sqrt(33.0)) / 32.0);
  CHECK(ext.front().xi == doctest::Approx(xi0).epsilon(1e-10));
  const double kappa0 = 16.0 * std::sqrt(2.0 / (15.0 + std::sqrt(33.0))) /
                        (4.0 + std::sqrt(34.0 - 2.0 * std::sqrt(33.0)));
  CHECK(1.0 / ext.front().value == doctest::Approx(kappa0).epsilon(1e-10));
}

TEST_CASE("all-plus branch has one maximum and no minimum for every n0") {
  for (int n0 = 1; n0 <= 8; ++n0) {
    const auto ext = chi_extrema(SignSequence::all_plus(n0));
    REQUIRE(ext.size() == 1);
    CHECK(ext.front().is_max);
  }
}

TEST_CASE("fold values for n = 5 and n = 11") {
  const auto e5 = chi_extrema(SignSequence::all_plus(2));
  REQUIRE(e5.size() == 1);
  CHECK(e5.front().xi == doctest::Approx(0.88209).epsilon(2e-5));
  CHECK(1.0 / e5.front().value == doctest::Approx(0.60670).epsilon(2e-5));
  const auto e11 = chi_extrema(SignSequence::all_plus(5));
  REQUIRE(e11.size() == 1);
  CHECK(e11.front().xi == doctest::Approx(0.94573).epsilon(2e-5));
  CHECK(1.0 / e11.front().value == doctest::Approx(0.62791).epsilon(2e-5));
}

TEST_CASE("roots of the consistency relation at n = 3, beta = 1") {
  const auto plus = SignSequence::all_plus(1);
  const auto roots = solve_xi(plus, 1.0);
  REQUIRE(roots.size() == 2);
  CHECK(roots.back() == 1.0);  // branch point root, included exactly

  // second root from a dense scan of xi (1 + 2 sqrt(1-xi^2)) = 1
  double best = 0.0, best_err = 1e300;
  for (int k = 1; k < 1000000; ++k) {
    const double xi = k * 1e-6;
    const double err = std::fabs(chi_eval(plus, xi) - 1.0);
    if (xi < 0.9 && err < best_err) {
      best_err = err;
      best = xi;
    }
  }
  CHECK(roots.front() == doctest::Approx(best).epsilon(1e-5));
}

TEST_CASE("no roots above the fold") {
  CHECK(solve_xi(SignSequence::all_plus(1), 1.7602).empty());
  CHECK(solve_xi(SignSequence::all_plus(1), 5.0).empty());
}

TEST_CASE("root count by region for the mirror sequence") {
  const auto minus = SignSequence::all_minus(1);
  // |chi| peaks at 1/kappa0_hat ~ 0.369 on the negative side, crosses zero at
  // sqrt(3)/2 and climbs to 1 at the branch point
  CHECK(solve_xi(minus, 0.2).size() == 3);
  CHECK(solve_xi(minus, 0.5).size() == 1);
  CHECK(solve_xi(minus, 1.2).empty());
}

TEST_CASE("equilibrium construction satisfies the reduced equations") {
  for (int n0 : {1, 2, 3}) {
    const ModelConfig cfg(2 * n0 + 1, 1.0, 3.0);
    for (const auto& sigma : enumerate_sequences(n0)) {
      for (double xi : solve_xi(sigma, cfg.beta)) {
        const Equilibrium eq = build_equilibrium(sigma, xi, cfg);
        for (double f : reduced_vector_field(ReducedState{eq.v}, cfg))
          CHECK(std::fabs(f) < 1e-10);
        double ssum = 0.0;
        for (double v : eq.v) ssum += std::sin(v);
        CHECK(std::fabs(ssum) < 1e-12);
      }
    }
  }
}

TEST_CASE("all-plus equilibrium components are antisymmetric") {
  const ModelConfig cfg(11, 1.0, 2.0);
  const auto plus = SignSequence::all_plus(5);
  for (double xi : solve_xi(plus, cfg.beta)) {
    const Equilibrium eq = build_equilibrium(plus, xi, cfg);
    for (int i = 1; i <= 5; ++i)
      CHECK(eq.v[i - 1] == doctest::Approx(-eq.v[10 - i]).epsilon(1e-12));
  }
}

TEST_CASE("branch point state at n = 3") {
  const ModelConfig cfg(3, 1.0, 1.0);
  const Equilibrium eq = build_equilibrium(SignSequence::all_plus(1), 1.0, cfg);
  CHECK(eq.v[0] == doctest::Approx(-kPi / 2).epsilon(1e-12));
  CHECK(eq.v[1] == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(eq.c_hat == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("mirror-branch state matches its arcsin representation") {
  const auto minus = SignSequence::all_minus(1);
  const double beta = 0.3;
  const ModelConfig cfg(3, 1.0, 1.0 / beta);
  for (double xi : solve_xi(minus, beta)) {
    const Equilibrium eq = build_equilibrium(minus, xi, cfg);
    // v1 = arcsin(a / (3 K c_hat)) - pi up to wrapping, v2 = -v1
    const double arg = cfg.a / (3.0 * cfg.K * eq.c_hat);
    CHECK(wrap_angle(eq.v[0] - (std::asin(arg) - kPi)) ==
          doctest::Approx(0.0).epsilon(1e-10));
    CHECK(eq.v[1] == doctest::Approx(-eq.v[0]).epsilon(1e-12));
  }
}

TEST_CASE("construction rejects inconsistent xi") {
  const ModelConfig cfg(3, 1.0, 1.0);
  CHECK_THROWS_AS(build_equilibrium(SignSequence::all_plus(1), 0.5, cfg),
                  std::invalid_argument);
}

TEST_CASE("pair swap preserves chi and the order parameter") {
  const auto sigma = SignSequence::from_string("+-+-");  // unpaired at i = 1 and 2
  const auto swapped = sigma.pair_swapped(1);
  CHECK(swapped.str() == "--++");
  const ChiCurve a(sigma), b(swapped);
  for (int k = 0; k <= 50; ++k) {
    const double xi = k / 50.0;
    CHECK(a.chi(xi) == doctest::Approx(b.chi(xi)).epsilon(1e-15));
  }
  const ModelConfig cfg(5, 1.0, 4.0);
  const auto ra = solve_xi(sigma, cfg.beta);
  const auto rb = solve_xi(swapped, cfg.beta);
  REQUIRE(ra.size() == rb.size());
  for (std::size_t k = 0; k < ra.size(); ++k) {
    CHECK(ra[k] == doctest::Approx(rb[k]).epsilon(1e-12));
    CHECK(build_equilibrium(sigma, ra[k], cfg).c_hat ==
          doctest::Approx(build_equilibrium(swapped, rb[k], cfg).c_hat).epsilon(1e-14));
  }
}

TEST_CASE("chi classes partition the sequences") {
  SUBCASE("n0 = 1") {
    const auto classes = dedup_chi_classes(1);
    REQUIRE(classes.size() == 3);
    std::size_t mixed = 0;
    for (const auto& c : classes) {
      if (c.key == "U") {
        mixed = c.members.size();
        for (const auto& m : c.members)
          for (int k = 1; k <= 10; ++k)
            CHECK(chi_eval(m, k / 10.0) == doctest::Approx(k / 10.0).epsilon(1e-15));
      }
    }
    CHECK(mixed == 2);
  }
  SUBCASE("n0 = 2") {
    const auto classes = dedup_chi_classes(2);
    CHECK(classes.size() == 9);
    for (const auto& c : classes) {
      CHECK(c.members.size() ==
            (1u << std::count(c.key.begin(), c.key.end(), 'U')));
      for (const auto& m : c.members)
        for (int k = 0; k <= 16; ++k)
          CHECK(std::fabs(chi_eval(m, k / 16.0) - chi_eval(c.members[0], k / 16.0)) <
                1e-15);
      if (c.key == "UU")
        for (int k = 0; k <= 16; ++k)
          CHECK(chi_eval(c.members[0], k / 16.0) ==
                doctest::Approx(k / 32.0).epsilon(1e-15));
    }
    // distinct classes disagree somewhere
    for (std::size_t i = 0; i < classes.size(); ++i)
      for (std::size_t j = i + 1; j < classes.size(); ++j) {
        double gap = 0.0;
        for (int k = 0; k <= 16; ++k)
          gap = std::max(gap, std::fabs(chi_eval(classes[i].members[0], k / 16.0) -
                                        chi_eval(classes[j].members[0], k / 16.0)));
        CHECK(gap > 1e-6);
      }
  }
  SUBCASE("n0 = 5") {
    const auto classes = dedup_chi_classes(5);
    CHECK(classes.size() == 243);  // 3^5 pair configurations
    std::size_t total = 0;
    for (const auto& c : classes) {
      total += c.members.size();
      CHECK(c.members.size() ==
            (1u << std::count(c.key.begin(), c.key.end(), 'U')));
      for (const auto& m : c.members)
        for (int k = 1; k <= 8; ++k)
          CHECK(std::fabs(chi_eval(m, k / 8.0) - chi_eval(c.members[0], k / 8.0)) <
                1e-14);
    }
    CHECK(total == 1024);
  }
}

TEST_CASE("root counts agree with a dense scan across many sequences") {
  // property check of the breakpoint bracketing: the number of roots of
  // |chi| = beta matches the sign changes of |chi| - beta on a fine grid
  Rng01 rng(2024);
  const auto seqs = enumerate_sequences(5);
  for (int rep = 0; rep < 40; ++rep) {
    const SignSequence& sigma = seqs[static_cast<std::size_t>(rng.next() * seqs.size())];
    const double beta = 0.05 + 2.0 * rng.next();
    const auto roots = solve_xi(sigma, beta);

    constexpr int kGrid = 200000;
    int scan = 0;
    double prev = -beta;  // g(0)
    for (int k = 1; k <= kGrid; ++k) {
      const double g = std::fabs(chi_eval(sigma, static_cast<double>(k) / kGrid)) - beta;
      if (g != 0.0 && prev != 0.0 && (g > 0.0) != (prev > 0.0)) ++scan;
      if (g != 0.0) prev = g;
    }
    CHECK(roots.size() == static_cast<std::size_t>(scan));
    for (double r : roots)
      CHECK(std::fabs(std::fabs(chi_eval(sigma, r)) - beta) < 1e-7 * std::max(1.0, beta));
  }
}

TEST_CASE("branch-point order parameters match their surds") {
  // C_D1 = (n0/n) chi(1) for the all-plus sequence
  const double cd1_5 = 2.0 / 5.0 * chi_eval(SignSequence::all_plus(2), 1.0);
  CHECK(cd1_5 == doctest::Approx((1.0 + std::sqrt(3.0)) / 5.0).epsilon(1e-14));
  const double cd1_11 = 5.0 / 11.0 * chi_eval(SignSequence::all_plus(5), 1.0);
  CHECK(cd1_11 ==
        doctest::Approx((19.0 + 4.0 * std::sqrt(6.0) + 2.0 * std::sqrt(21.0)) / 55.0)
            .epsilon(1e-14));
}

TEST_CASE("order parameter solver against fixed-point iteration") {
  const ModelConfig cfg = ModelConfig::from_ratio(3, 1.0);
  const auto CD = solve_CD(cfg);
  REQUIRE(CD.has_value());
  double c = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double arg = 1.0 / (3.0 * c);
    c = 1.0 / 3.0 + 2.0 / 3.0 * std::sqrt(1.0 - arg * arg);
  }
  CHECK(*CD == doctest::Approx(c).epsilon(1e-10));
  CHECK(!solve_CD(ModelConfig::from_ratio(3, 0.5)).has_value());
  CHECK(*solve_CD(ModelConfig::from_ratio(3, 1e4)) == doctest::Approx(1.0).epsilon(1e-6));
}

}  // TEST_SUITE
