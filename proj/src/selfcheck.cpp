#include "kmsync/selfcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "kmsync/bifurcation.hpp"
#include "kmsync/continuum.hpp"
#include "kmsync/dynamics.hpp"
#include "kmsync/equilibria.hpp"
#include "kmsync/model.hpp"
#include "kmsync/stability.hpp"

namespace kmsync {

namespace {

class Suite {
 public:
  explicit Suite(std::vector<CheckResult>& out) : out_(out) {}

  void expect_near(const std::string& id, const std::string& name, double got,
                   double want, double tol) {
    const bool ok = std::fabs(got - want) <= tol;
    std::ostringstream ss;
    ss << "got " << format_g15(got) << ", expected " << format_g15(want) << " +- "
       << format_g15(tol);
    out_.push_back({id, name, ok, ss.str()});
  }

  void expect_true(const std::string& id, const std::string& name, bool ok,
                   const std::string& detail) {
    out_.push_back({id, name, ok, detail});
  }

  void expect_count_ge(const std::string& id, const std::string& name,
                       std::uint64_t got, std::uint64_t bound) {
    std::ostringstream ss;
    ss << "got " << got << ", lower bound " << bound;
    out_.push_back({id, name, got >= bound, ss.str()});
  }

  void expect_count_eq(const std::string& id, const std::string& name,
                       std::uint64_t got, std::uint64_t want) {
    std::ostringstream ss;
    ss << "got " << got << ", expected " << want;
    out_.push_back({id, name, got == want, ss.str()});
  }

 private:
  std::vector<CheckResult>& out_;
};

// --------------------------------------------------------------------------
// criterion 1: closed-form reference constants, tolerance 1e-4
// --------------------------------------------------------------------------

void criterion1(Suite& s) {
  const double tol = 1e-4;

  // n = 3
  {
    const int n0 = 1, n = 3;
    const auto plus = SignSequence::all_plus(n0);
    const auto ext = ChiCurve(plus).extrema();
    const bool one_max = ext.size() == 1 && ext.front().is_max;
    s.expect_true("1.1", "n=3 all-plus branch has a single fold", one_max,
                  "extrema found: " + std::to_string(ext.size()));
    const double xi0 = ext.front().xi;
    const double xi0_exact = std::sqrt((15.0 + std::sqrt(33.0)) / 32.0);
    s.expect_near("1.2", "n=3 fold location (closed form)", xi0, xi0_exact, 1e-9);
    s.expect_near("1.3", "n=3 kappa0", 1.0 / ext.front().value, 0.56812, tol);
    s.expect_near("1.4", "n=3 v0 = arcsin(xi0)", std::asin(xi0), 0.93592, tol);
    s.expect_near("1.5", "n=3 C_D0 at the fold",
                  (double)n0 / n * ext.front().value / xi0, 0.72871, tol);

    const ModelConfig cfg(n, 1.0, 1.0);
    const auto pf = detect_pitchforks(corner_quadruple(plus), cfg);
    s.expect_true("1.6", "n=3 branch point exists", pf.has_value(), "");
    if (pf) s.expect_near("1.7", "n=3 branch point at K/a", pf->K_star, 1.0, tol);

    // mirror branch, sigma = (-1,-1)
    const auto minus = SignSequence::all_minus(n0);
    const auto mext = ChiCurve(minus).extrema();
    s.expect_true("1.8", "n=3 mirror branch has a single fold", mext.size() == 1,
                  "extrema found: " + std::to_string(mext.size()));
    const double mxi = mext.front().xi;
    const double mchi = mext.front().value;
    const double c_hat0 = (double)n0 / n * mchi / mxi;
    s.expect_near("1.9", "n=3 mirror C_D0 at the fold", c_hat0, -0.22871, tol);
    const double angle = std::asin(std::fabs(mchi) / (3.0 * c_hat0));
    s.expect_near("1.10", "n=3 mirror angle at the fold", angle, -0.56782, tol);

    s.expect_near("1.11", "n=3 kappa_hat0 as a K/a bound", 1.0 / std::fabs(mchi),
                  2.70996, tol);
    // brute-force scan of the negative-sign region confirms the direction of
    // the bound: negative-c_hat roots exist only above kappa_hat0 in K/a
    const ChiCurve mc(minus);
    double peak = 0.0;
    for (int k = 1; k < 1000000; ++k) {
      const double xi = k * 1e-6;
      const double c = mc.chi(xi);
      if (c < 0.0) peak = std::max(peak, -c);
    }
    s.expect_near("1.12", "n=3 mirror-branch existence threshold (1e6-point scan)",
                  1.0 / peak, 2.70996, tol);
    auto count_negative_roots = [&](double beta) {
      int c = 0;
      for (double xi : solve_xi(minus, beta))
        if (mc.chi(xi) < 0.0) ++c;
      return c;
    };
    const bool direction = count_negative_roots(peak * (1.0 - 1e-3)) == 2 &&
                           count_negative_roots(peak * (1.0 + 1e-3)) == 0;
    s.expect_true("1.13", "n=3 mirror-branch roots appear for K/a above the bound",
                  direction, "two folds below the peak beta, none above");
  }

  // n = 5 and n = 11
  const struct {
    int n;
    double kappa0, xi0, cd1, kappa1, cd0;
  } rows[] = {{5, 0.60670, 0.88209, 0.54641, 0.73205, 0.74741},
              {11, 0.62791, 0.94573, 0.69023, 0.65853, 0.76543}};
  int idx = 14;
  for (const auto& r : rows) {
    const int n0 = (r.n - 1) / 2;
    const auto plus = SignSequence::all_plus(n0);
    const ChiCurve curve(plus);
    const auto ext = curve.extrema();
    const std::string tag = "n=" + std::to_string(r.n) + " ";
    s.expect_true("1." + std::to_string(idx++), tag + "single fold",
                  ext.size() == 1 && ext.front().is_max,
                  "extrema found: " + std::to_string(ext.size()));
    s.expect_near("1." + std::to_string(idx++), tag + "kappa0",
                  1.0 / ext.front().value, r.kappa0, tol);
    s.expect_near("1." + std::to_string(idx++), tag + "xi0", ext.front().xi, r.xi0,
                  tol);
    s.expect_near("1." + std::to_string(idx++), tag + "C_D1",
                  (double)n0 / r.n * curve.chi(1.0), r.cd1, tol);
    const ModelConfig cfg(r.n, 1.0, 1.0);
    const auto pf = detect_pitchforks(corner_quadruple(plus), cfg);
    s.expect_near("1." + std::to_string(idx++), tag + "kappa1",
                  pf ? pf->K_star : 0.0, r.kappa1, tol);
    s.expect_near("1." + std::to_string(idx++), tag + "C_D0 at the fold",
                  (double)n0 / r.n * ext.front().value / ext.front().xi, r.cd0, tol);
  }

  // continuum threshold and limits
  {
    const double half_pi = 0.5 * kPi;
    s.expect_true("1.26", "continuum solution exists at K/a = 2/pi",
                  solve_C_continuous(half_pi * (1.0 - 1e-9)).has_value(), "");
    s.expect_true("1.27", "no continuum solution below K/a = 2/pi",
                  !solve_C_continuous(half_pi * (1.0 + 1e-6)).has_value(), "");
    s.expect_near("1.28", "threshold ratio 2/pi", 2.0 / kPi, 0.63662, tol);
    const auto Cth = solve_C_continuous(half_pi);
    s.expect_near("1.29", "C = pi/4 at the threshold", Cth ? *Cth : 0.0, kPi / 4.0,
                  tol);
    const auto Cbig = solve_C_continuous(0.01);  // K/a = 100
    s.expect_near("1.30", "C -> 1 for large K/a", Cbig ? *Cbig : 0.0, 1.0, tol);
  }
}

// --------------------------------------------------------------------------
// criterion 2: exhaustive event counting
// --------------------------------------------------------------------------

void criterion2(Suite& s) {
  int idx = 1;
  for (int n0 : {2, 3, 4, 5}) {
    const EventCounts c = count_events(n0);
    const std::string tag = "n0=" + std::to_string(n0) + " ";
    auto id = [&]() { return "2." + std::to_string(idx++); };
    s.expect_count_eq(id(), tag + "distinct families", c.distinct_families,
                      1ull << (2 * n0));
    s.expect_count_eq(id(), tag + "coarse families", c.coarse_families,
                      3ull << (2 * (n0 - 1)));
    s.expect_count_ge(id(), tag + "saddle-nodes", c.saddle_nodes, c.saddle_node_bound);
    s.expect_count_ge(id(), tag + "pitchforks", c.pitchforks, c.pitchfork_bound);
    if (c.pitchfork_prime_bound > 0)
      s.expect_count_ge(id(), tag + "pitchforks (prime bound)", c.pitchforks,
                        c.pitchfork_prime_bound);
  }
}

// --------------------------------------------------------------------------
// criterion 3: stability rule cross-validation
// --------------------------------------------------------------------------

void criterion3(Suite& s) {
  int idx = 1;
  for (int n : {3, 5, 11}) {
    const int n0 = (n - 1) / 2;
    const double xi0 = all_plus_fold_xi(n0);
    const auto seqs = enumerate_sequences(n0);
    std::vector<int> mismatches(seqs.size(), 0);
    std::vector<int> closed_form_mismatches(seqs.size(), 0);
    std::vector<long long> tested(seqs.size(), 0);

    parallel_for(seqs.size(), [&](std::size_t k) {
      const SignSequence& sigma = seqs[k];
      const ChiCurve curve(sigma);
      for (int g = 0; g < 50; ++g) {
        const double xi = 0.01 + (0.99 - 0.01) * g / 49.0;
        if (std::fabs(curve.chi(xi)) < 1e-10) continue;   // no finite-K state here
        if (std::fabs(xi - xi0) < 1e-6) continue;         // marginal band
        const ModelConfig cfg = config_on_branch(sigma, xi, 1.0);
        const Equilibrium eq = build_equilibrium(sigma, xi, cfg);
        const StabilityReport rep = stability_at(eq, cfg);
        const Verdict predicted = stability_rule(sigma, xi, xi0);
        ++tested[k];
        if (rep.verdict != predicted) ++mismatches[k];
        if (n == 3) {
          const Verdict cf = n3_closed_form_stability(eq.v[0], eq.v[1]);
          if (cf != Verdict::Marginal && cf != rep.verdict) ++closed_form_mismatches[k];
        }
      }
    });

    long long total = 0, bad = 0, cf_bad = 0;
    for (std::size_t k = 0; k < seqs.size(); ++k) {
      total += tested[k];
      bad += mismatches[k];
      cf_bad += closed_form_mismatches[k];
    }
    auto id = [&]() { return "3." + std::to_string(idx++); };
    s.expect_true(id(), "n=" + std::to_string(n) + " spectrum matches the stability rule",
                  bad == 0,
                  std::to_string(bad) + " mismatches over " + std::to_string(total) +
                      " points");
    if (n == 3)
      s.expect_true(id(), "n=3 closed form agrees with the spectrum", cf_bad == 0,
                    std::to_string(cf_bad) + " mismatches over " + std::to_string(total) +
                        " points");
  }

  // coupling-dominated limit spectra for all sign splits
  for (int n0 : {2, 3, 5}) {
    const ModelConfig cfg(2 * n0 + 1, 1.0, 1.0);
    bool all_ok = true;
    std::string fail;
    for (int n_plus = 0; n_plus <= 2 * n0; ++n_plus) {
      std::vector<int> signs(2 * n0, -1);
      for (int i = 0; i < n_plus; ++i) signs[i] = 1;
      const LimitMatrixCheck chk = limit_matrix_check(SignSequence(signs), cfg);
      if (!chk.spectrum_matches || !chk.counts_match) {
        all_ok = false;
        fail = "n_plus=" + std::to_string(n_plus);
      }
    }
    s.expect_true("3." + std::to_string(idx++),
                  "n0=" + std::to_string(n0) + " limit matrix spectra and counts",
                  all_ok, all_ok ? "all splits" : "failed at " + fail);
  }
}

// --------------------------------------------------------------------------
// criterion 4: diagram-data reproduction
// --------------------------------------------------------------------------

void criterion4(Suite& s) {
  const double tol = 1e-4;

  // order-parameter tables: first K/a with a locked state, and the value at
  // the branch point
  {
    const struct {
      int n;
      double kappa0, kappa1, cd1;
    } rows[] = {{3, 0.56812, 1.0, 1.0 / 3.0},
                {5, 0.60670, 0.73205, 0.54641},
                {11, 0.62791, 0.65853, 0.69023}};
    int idx = 1;
    for (const auto& r : rows) {
      const int n0 = (r.n - 1) / 2;
      double first = 0.0;
      for (int k = 0; k <= 400; ++k) {
        const double ratio = 0.5 + 1.5 * k / 400.0;
        if (solve_CD(ModelConfig::from_ratio(r.n, ratio))) {
          first = ratio;
          break;
        }
      }
      s.expect_near("4." + std::to_string(idx++),
                    "n=" + std::to_string(r.n) + " C_D table onset near kappa0", first,
                    r.kappa0, 1.5 / 400.0 + tol);

      // exactly at the branch point the root list must include xi = 1
      const double beta_branch = chi_eval(SignSequence::all_plus(n0), 1.0);
      const auto roots = solve_xi(SignSequence::all_plus(n0), beta_branch);
      const bool has_one =
          !roots.empty() && std::fabs(roots.back() - 1.0) < 1e-9;
      s.expect_true("4." + std::to_string(idx++),
                    "n=" + std::to_string(r.n) + " branch-point root at xi=1", has_one,
                    "roots: " + std::to_string(roots.size()));
      if (has_one) {
        const ModelConfig cfg = config_on_branch(SignSequence::all_plus(n0), 1.0);
        const Equilibrium eq = build_equilibrium(SignSequence::all_plus(n0), 1.0, cfg);
        s.expect_near("4." + std::to_string(idx++),
                      "n=" + std::to_string(r.n) + " C_D at the branch point", eq.c_hat,
                      r.cd1, tol);
      }
    }
  }

  // bifurcation diagrams
  {
    const auto check_diagram = [&](int n, double lo, double hi, double kappa0,
                                   int base) {
      const int n0 = (n - 1) / 2;
      const double xi0 = all_plus_fold_xi(n0);
      const auto rows = branch_diagram(n0, lo, hi, 81, 1.0);
      bool stable_only_allplus = true;
      bool stable_below_fold = true;
      double min_allplus_K = hi + 1.0;
      const std::uint64_t allplus = SignSequence::all_plus(n0).index();
      bool some_stable = false;
      for (const DiagramRow& r : rows) {
        if (r.sigma_id == allplus) min_allplus_K = std::min(min_allplus_K, r.K);
        if (r.flag == 's') {
          some_stable = true;
          if (r.sigma_id != allplus) stable_only_allplus = false;
          if (r.xi > xi0 + 1e-9) stable_below_fold = false;
        }
      }
      const std::string tag = "n=" + std::to_string(n) + " diagram ";
      s.expect_true("4." + std::to_string(base), tag + "has stable rows", some_stable,
                    "");
      s.expect_true("4." + std::to_string(base + 1),
                    tag + "stable flags only on the all-plus branch below its fold",
                    stable_only_allplus && stable_below_fold, "");
      s.expect_near("4." + std::to_string(base + 2), tag + "fold K location",
                    min_allplus_K, kappa0, (hi - lo) / 80.0 + tol);
    };
    check_diagram(3, 0.4, 1.4, 0.56812, 10);
    check_diagram(5, 0.5, 2.5, 0.60670, 13);
  }

  // n=3: the stable/unstable boundary of the all-plus branch sits at v0
  {
    const double v0 = 0.93592;
    const auto rows = branch_diagram(1, 0.5, 1.6, 111, 1.0);
    const std::uint64_t allplus = SignSequence::all_plus(1).index();
    double max_stable_v2 = 0.0, min_unstable_v2 = 10.0;
    for (const DiagramRow& r : rows) {
      if (r.sigma_id != allplus || r.component != 2) continue;
      if (r.flag == 's') max_stable_v2 = std::max(max_stable_v2, r.v_value);
      if (r.flag == 'u') min_unstable_v2 = std::min(min_unstable_v2, r.v_value);
    }
    s.expect_true("4.16", "n=3 stable segment ends at v0",
                  max_stable_v2 < v0 + 1e-3 && min_unstable_v2 > v0 - 1e-3,
                  "stable v2 up to " + format_g15(max_stable_v2) +
                      ", unstable from " + format_g15(min_unstable_v2) +
                      ", v0 = " + format_g15(v0));
  }
}

// --------------------------------------------------------------------------
// criterion 5: dynamics verification
// --------------------------------------------------------------------------

void criterion5(Suite& s) {
  const int n = 5, n0 = 2;

  // decay onto the locked family
  {
    const ModelConfig cfg = ModelConfig::from_ratio(n, 0.7);
    const auto plus = SignSequence::all_plus(n0);
    const auto roots = solve_xi(plus, cfg.beta);
    const Equilibrium eq = build_equilibrium(plus, roots.front(), cfg);
    const FullState ustar = lift(ReducedState{eq.v}, 0.0, cfg);

    Rng01 rng(12345);
    std::vector<double> pert(n);
    double sq = 0.0;
    for (double& p : pert) {
      p = rng.next_symmetric();
      sq += p * p;
    }
    const double scale = 1e-3 / std::sqrt(sq / n);
    FullState u0 = ustar;
    for (int i = 0; i < n; ++i) u0.u[i] += pert[i] * scale;

    const double t_end = 200.0 / cfg.K;
    const Trajectory traj = integrate(u0, cfg, t_end, 0.01 / cfg.K, 200);
    const StepFunctionState target{ustar.u};
    const double final_dist =
        family_distance(StepFunctionState{traj.states.back()}, target);
    s.expect_true("5.1", "n=5 K/a=0.7 perturbed locked state decays below 1e-6",
                  final_dist < 1e-6,
                  "distance " + format_g15(final_dist) + " at t = 200/K");
  }

  // escape from every branch carrying a reflected oscillator
  {
    const auto seqs = enumerate_sequences(n0);
    std::vector<int> escaped(seqs.size(), 1);
    parallel_for(seqs.size(), [&](std::size_t k) {
      const SignSequence& sigma = seqs[k];
      if (sigma.all_ones()) return;
      const double xi = 0.5;
      const ModelConfig cfg = config_on_branch(sigma, xi, 1.0);
      const Equilibrium eq = build_equilibrium(sigma, xi, cfg);
      const FullState ustar = lift(ReducedState{eq.v}, 0.0, cfg);

      const EigenSystem es = jacobi_eigensystem(jacobian(ReducedState{eq.v}, cfg));
      const int top = cfg.n - 1;  // most positive eigenvalue
      if (es.values[top] <= 0.0) {
        escaped[k] = 0;
        return;
      }
      double wnorm = 0.0;
      for (int i = 0; i < cfg.n; ++i) wnorm += es.vectors(i, top) * es.vectors(i, top);
      wnorm = std::sqrt(wnorm);
      FullState u0 = ustar;
      for (int i = 0; i < cfg.n; ++i)
        u0.u[i] += 1e-6 * es.vectors(i, top) * std::sqrt((double)cfg.n) / wnorm;

      const double t_end = 500.0 / cfg.K;
      const Trajectory traj = integrate(u0, cfg, t_end, 0.01 / cfg.K, 250);
      const StepFunctionState target{ustar.u};
      double reached = 0.0;
      for (const auto& row : traj.states)
        reached = std::max(reached, family_distance(StepFunctionState{row}, target));
      escaped[k] = reached > 1e-2 ? 1 : 0;
    });
    int fails = 0;
    for (int e : escaped)
      if (!e) ++fails;
    s.expect_true("5.2",
                  "every n=5 branch with a reflected oscillator escapes a 1e-6 kick",
                  fails == 0, std::to_string(fails) + " of 15 branches failed to escape");
  }

  // integrator order by step halving
  {
    const ModelConfig cfg(5, 1.0, 1.0);
    FullState u0{{0.3, -0.1, 0.7, 0.2, -0.5}};
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
    s.expect_true("5.3", "step-halving order in [3.5, 4.5]",
                  order >= 3.5 && order <= 4.5, "measured order " + format_g15(order));
  }
}

// --------------------------------------------------------------------------
// criterion 6: convergence and property suites
// --------------------------------------------------------------------------

// damped Newton on the reduced field with a finite-difference Jacobian;
// independent of the arcsin construction it cross-checks
bool newton_reduced(std::vector<double>& v, const ModelConfig& cfg) {
  const int m = 2 * cfg.n0;
  auto norm_inf = [&](const std::vector<double>& f) {
    double w = 0.0;
    for (double x : f) w = std::max(w, std::fabs(x));
    return w;
  };
  std::vector<double> f = reduced_vector_field(ReducedState{v}, cfg);
  for (int it = 0; it < 80; ++it) {
    const double r0 = norm_inf(f);
    if (r0 < 1e-11) return true;
    // finite-difference Jacobian
    std::vector<double> J(m * m);
    const double h = 1e-7;
    for (int j = 0; j < m; ++j) {
      std::vector<double> vp = v, vm = v;
      vp[j] += h;
      vm[j] -= h;
      const auto fp = reduced_vector_field(ReducedState{vp}, cfg);
      const auto fm = reduced_vector_field(ReducedState{vm}, cfg);
      for (int i = 0; i < m; ++i) J[i * m + j] = (fp[i] - fm[i]) / (2.0 * h);
    }
    // solve J dv = f by Gaussian elimination with partial pivoting
    std::vector<double> rhs = f;
    std::vector<int> piv(m);
    for (int i = 0; i < m; ++i) piv[i] = i;
    bool singular = false;
    for (int col = 0; col < m && !singular; ++col) {
      int best = col;
      for (int r = col + 1; r < m; ++r)
        if (std::fabs(J[piv[r] * m + col]) > std::fabs(J[piv[best] * m + col])) best = r;
      std::swap(piv[col], piv[best]);
      const double d = J[piv[col] * m + col];
      if (std::fabs(d) < 1e-14) {
        singular = true;
        break;
      }
      for (int r = col + 1; r < m; ++r) {
        const double fac = J[piv[r] * m + col] / d;
        for (int c2 = col; c2 < m; ++c2) J[piv[r] * m + c2] -= fac * J[piv[col] * m + c2];
        rhs[piv[r]] -= fac * rhs[piv[col]];
      }
    }
    if (singular) return false;
    std::vector<double> dv(m);
    for (int r = m - 1; r >= 0; --r) {
      double acc = rhs[piv[r]];
      for (int c2 = r + 1; c2 < m; ++c2) acc -= J[piv[r] * m + c2] * dv[c2];
      dv[r] = acc / J[piv[r] * m + r];
    }
    // backtracking damping
    double lambda = 1.0;
    bool moved = false;
    for (int half = 0; half < 25; ++half) {
      std::vector<double> trial = v;
      for (int i = 0; i < m; ++i) trial[i] = wrap_angle(trial[i] - lambda * dv[i]);
      const auto ft = reduced_vector_field(ReducedState{trial}, cfg);
      if (norm_inf(ft) < r0) {
        v = trial;
        f = ft;
        moved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!moved) return false;
  }
  return norm_inf(f) < 1e-11;
}

void completeness_check(Suite& s, const std::string& id, int n, int starts_per_axis) {
  const int n0 = (n - 1) / 2;
  const int m = 2 * n0;
  const ModelConfig cfg(n, 1.0, 3.0);  // beta = 1/3

  // enumerated equilibria at this beta
  std::vector<std::vector<double>> known;
  for (const auto& sigma : enumerate_sequences(n0))
    for (double xi : solve_xi(sigma, cfg.beta))
      known.push_back(build_equilibrium(sigma, xi, cfg).v);

  long long starts = 1;
  for (int i = 0; i < m; ++i) starts *= starts_per_axis;

  std::vector<int> unmatched(starts, 0);
  std::vector<int> converged(starts, 0);
  parallel_for(static_cast<std::size_t>(starts), [&](std::size_t flat) {
    std::vector<double> v(m);
    std::size_t rem = flat;
    for (int i = 0; i < m; ++i) {
      const int cell = rem % starts_per_axis;
      rem /= starts_per_axis;
      v[i] = -kPi + kTwoPi * (cell + 0.5) / starts_per_axis;
    }
    if (!newton_reduced(v, cfg)) return;
    converged[flat] = 1;
    double best = 1e300;
    for (const auto& w : known) {
      double dist = 0.0;
      for (int i = 0; i < m; ++i)
        dist = std::max(dist, std::fabs(wrap_angle(v[i] - w[i])));
      best = std::min(best, dist);
    }
    if (best > 1e-6) unmatched[flat] = 1;
  });

  long long conv = 0, bad = 0;
  for (long long i = 0; i < starts; ++i) {
    conv += converged[i];
    bad += unmatched[i];
  }
  s.expect_true(id,
                "n=" + std::to_string(n) +
                    " multistart search finds only enumerated equilibria",
                bad == 0 && conv > 0,
                std::to_string(conv) + " converged runs, " + std::to_string(bad) +
                    " unmatched zeros, " + std::to_string(known.size()) +
                    " enumerated equilibria");
}

void criterion6(Suite& s) {
  // discrete order parameter converges to the mean-field one
  {
    const double beta = 1.0;
    const double C = *solve_C_continuous(beta);
    std::vector<double> errs;
    for (int n : {11, 23, 47, 95})
      errs.push_back(std::fabs(*solve_CD(ModelConfig::from_ratio(n, 1.0)) - C));
    const bool decreasing = errs[0] > errs[1] && errs[1] > errs[2] && errs[2] > errs[3];
    const double order = std::log(errs[0] / errs[3]) / std::log(95.0 / 11.0);
    s.expect_true("6.1", "|C_D(n) - C| decreasing with order >= 1 at K/a = 1",
                  decreasing && order >= 1.0,
                  "errors " + format_g15(errs[0]) + " .. " + format_g15(errs[3]) +
                      ", measured order " + format_g15(order));
  }

  // fold location climbs toward 1
  {
    std::vector<double> xi0s;
    for (int n : {5, 11, 23, 47}) xi0s.push_back(all_plus_fold_xi((n - 1) / 2));
    bool increasing = true;
    for (std::size_t i = 0; i + 1 < xi0s.size(); ++i)
      if (xi0s[i] >= xi0s[i + 1]) increasing = false;
    s.expect_true("6.2", "xi0(n) increases toward 1",
                  increasing && xi0s.back() < 1.0,
                  "xi0 = " + format_g15(xi0s[0]) + " .. " + format_g15(xi0s.back()));
  }

  // Jacobian against central differences of the full field
  {
    const ModelConfig cfg(5, 1.0, 1.3);
    const FrequencyProfile freq = make_frequency_profile(cfg);
    Rng01 rng(777);
    double worst = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<double> v(4);
      for (double& x : v) x = rng.next_symmetric() * 3.0;
      for (double& x : v) x = wrap_angle(x);
      const Matrix A = jacobian(ReducedState{v}, cfg);
      const FullState u = lift(ReducedState{v}, 0.0, cfg);
      const double h = 1e-6;
      for (int j = 0; j < 5; ++j) {
        FullState up = u, um = u;
        up.u[j] += h;
        um.u[j] -= h;
        const auto fp = vector_field(up, cfg, freq);
        const auto fm = vector_field(um, cfg, freq);
        for (int i = 0; i < 5; ++i)
          worst = std::max(worst, std::fabs((fp[i] - fm[i]) / (2.0 * h) - A(i, j)));
      }
    }
    s.expect_true("6.3", "Jacobian matches finite differences to 1e-6", worst < 1e-6,
                  "max deviation " + format_g15(worst));
  }

  // zero mode and sine-sum identity at every enumerated equilibrium (n = 5)
  {
    const ModelConfig cfg(5, 1.0, 3.0);
    double worst_angle = 0.0, worst_zero = 0.0, worst_sin = 0.0, worst_res = 0.0;
    for (const auto& sigma : enumerate_sequences(2)) {
      for (double xi : solve_xi(sigma, cfg.beta)) {
        const Equilibrium eq = build_equilibrium(sigma, xi, cfg);
        const auto f = reduced_vector_field(ReducedState{eq.v}, cfg);
        for (double x : f) worst_res = std::max(worst_res, std::fabs(x));
        double ssum = 0.0;
        for (double x : eq.v) ssum += std::sin(x);
        worst_sin = std::max(worst_sin, std::fabs(ssum));

        const EigenSystem es = jacobi_eigensystem(jacobian(ReducedState{eq.v}, cfg));
        int k0 = 0;
        for (int k = 1; k < cfg.n; ++k)
          if (std::fabs(es.values[k]) < std::fabs(es.values[k0])) k0 = k;
        worst_zero = std::max(worst_zero, std::fabs(es.values[k0]));
        double dot = 0.0;
        for (int i = 0; i < cfg.n; ++i) dot += es.vectors(i, k0) / std::sqrt(5.0);
        worst_angle = std::max(worst_angle, std::acos(std::min(1.0, std::fabs(dot))));
      }
    }
    s.expect_true("6.4", "rotation zero mode present at every equilibrium",
                  worst_zero < 1e-8 && worst_angle < 1e-6,
                  "max |lambda_0| = " + format_g15(worst_zero) + ", max angle " +
                      format_g15(worst_angle));
    s.expect_true("6.5", "sum of sines vanishes at every equilibrium",
                  worst_sin < 1e-12, "max |sum sin v| = " + format_g15(worst_sin));
    s.expect_true("6.6", "equilibrium residuals below 1e-10", worst_res < 1e-10,
                  "max residual " + format_g15(worst_res));
  }

  // derivative identity for chi
  {
    double worst = 0.0;
    for (int n0 : {1, 2, 5}) {
      const auto seqs = enumerate_sequences(n0);
      for (std::size_t k = 0; k < seqs.size(); k += std::max<std::size_t>(1, seqs.size() / 8)) {
        const ChiCurve curve(seqs[k]);
        for (int g = 1; g <= 9; ++g) {
          const double xi = 0.1 * g;
          const double h = 1e-6;
          const double fd = (curve.chi(xi + h) - curve.chi(xi - h)) / (2.0 * h);
          const double rhs = curve.chi(xi) / xi - curve.h(xi) * xi * xi;
          worst = std::max(worst, std::fabs(fd - rhs));
        }
      }
    }
    s.expect_true("6.7", "chi derivative identity holds pointwise to 1e-8",
                  worst < 1e-8, "max deviation " + format_g15(worst));
  }

  completeness_check(s, "6.8", 3, 36);
  completeness_check(s, "6.9", 5, 7);
}

}  // namespace

std::vector<CheckResult> run_selfcheck() {
  std::vector<CheckResult> results;
  Suite suite(results);

  struct Group {
    const char* name;
    double budget_s;
    void (*fn)(Suite&);
  };
  const Group groups[] = {
      {"1", 10.0, criterion1},  {"2", 60.0, criterion2},  {"3", 60.0, criterion3},
      {"4", 60.0, criterion4},  {"5", 120.0, criterion5}, {"6", 120.0, criterion6},
  };

  for (const Group& g : groups) {
    const auto t0 = std::chrono::steady_clock::now();
    g.fn(suite);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream ss;
    ss << "elapsed " << format_g15(elapsed) << " s, budget " << g.budget_s << " s";
    results.push_back({std::string(g.name) + ".time",
                       std::string("criterion ") + g.name + " runtime",
                       elapsed < g.budget_s, ss.str()});
  }
  return results;
}

int report_selfcheck(const std::vector<CheckResult>& results, std::ostream& os) {
  int failures = 0;
  std::map<std::string, std::pair<int, int>> groups;  // criterion -> (pass, total)
  for (const CheckResult& r : results) {
    os << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << " " << r.name;
    if (!r.detail.empty()) os << ": " << r.detail;
    os << "\n";
    if (!r.pass) ++failures;
    const std::string group = r.id.substr(0, r.id.find('.'));
    auto& g = groups[group];
    g.second += 1;
    if (r.pass) g.first += 1;
  }
  for (const auto& [group, counts] : groups) {
    const bool ok = counts.first == counts.second;
    os << "criterion " << group << ": " << (ok ? "PASS" : "FAIL") << " ("
       << counts.first << "/" << counts.second << " checks)\n";
  }
  return failures;
}

}  // namespace kmsync
