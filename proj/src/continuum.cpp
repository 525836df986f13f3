#include "kmsync/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kmsync {

const char* continuum_kind_name(ContinuumKind k) {
  switch (k) {
    case ContinuumKind::ContinuousStable: return "continuous";
    case ContinuumKind::ContinuousMirror: return "continuous-mirror";
    case ContinuumKind::Discontinuous: return "discontinuous";
  }
  return "?";
}

double ContinuumSolution::base_profile(double x) const {
  const double arg = beta * (x - 0.5) / C;
  return std::asin(std::clamp(arg, -1.0, 1.0));
}

bool ContinuumSolution::in_flip(double x) const {
  for (const Interval& f : flips)
    if (x >= f.lo && x <= f.hi) return true;
  return false;
}

double ContinuumSolution::profile(double x) const {
  const double U = base_profile(x);
  if (kind == ContinuumKind::ContinuousMirror) return kPi + U;
  if (kind == ContinuumKind::Discontinuous && in_flip(x))
    return (x >= 0.5) ? kPi - U : -U - kPi;
  return U;
}

double phi_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::domain_error("phi_eta: eta must lie in [0,1]");
  return std::asin(eta) + eta * std::sqrt(std::max(0.0, 1.0 - eta * eta));
}

std::optional<double> solve_C_continuous(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("solve_C_continuous: beta must be > 0");
  const double half_pi = 0.5 * kPi;
  if (beta > half_pi + 1e-12) return std::nullopt;
  if (beta >= half_pi) return beta / 2.0;  // eta = 1 at the critical coupling
  const double eta =
      bisect_root([&](double e) { return phi_eta(e) - beta; }, 1e-300, 1.0, 1e-15);
  return beta / (2.0 * eta);
}

ContinuumSolution continuous_solution(double beta) {
  const auto C = solve_C_continuous(beta);
  if (!C)
    throw std::runtime_error("continuous_solution: no locked state below K/a = 2/pi");
  ContinuumSolution sol;
  sol.kind = ContinuumKind::ContinuousStable;
  sol.C = *C;
  sol.beta = beta;
  return sol;
}

ContinuumSolution mirror_solution(double beta) {
  ContinuumSolution sol = continuous_solution(beta);
  sol.kind = ContinuumKind::ContinuousMirror;
  return sol;
}

namespace {

// sqrt(1 - (beta (x-1/2)/C)^2), clipped against roundoff outside the band
double coherence_integrand(double x, double beta, double C) {
  const double arg = beta * (x - 0.5) / C;
  return std::sqrt(std::max(0.0, 1.0 - arg * arg));
}

// int_{[0,1] \ I} q - int_I q with splits at flip boundaries and at the
// points where the arcsin argument reaches +-1
double signed_integral(const std::vector<Interval>& flips, double beta, double C) {
  auto q = [&](double x) { return coherence_integrand(x, beta, C); };
  std::vector<double> knots;
  for (const Interval& f : flips) {
    knots.push_back(f.lo);
    knots.push_back(f.hi);
  }
  const double edge = C / beta;  // |arg| = 1 at x = 1/2 +- C/beta
  if (edge < 0.5) {
    knots.push_back(0.5 - edge);
    knots.push_back(0.5 + edge);
  }
  double total = adaptive_simpson(q, 0.0, 1.0, 1e-12, knots);
  for (const Interval& f : flips)
    total -= 2.0 * adaptive_simpson(q, f.lo, f.hi, 1e-12, knots);
  return total;
}

void validate_flips(const std::vector<Interval>& flips) {
  int left = 0, right = 0;
  for (const Interval& f : flips) {
    if (!(f.lo >= -1e-12 && f.hi <= 1.0 + 1e-12 && f.lo <= f.hi))
      throw std::invalid_argument("flip set: intervals must satisfy 0 <= lo <= hi <= 1");
    const bool in_left = f.hi <= 0.5 + 1e-12;
    const bool in_right = f.lo >= 0.5 - 1e-12;
    if (!in_left && !in_right)
      throw std::invalid_argument("flip set: intervals may not straddle x = 1/2");
    (in_left ? left : right) += 1;
  }
  if (left > 64 || right > 64)
    throw std::invalid_argument("flip set: at most 64 intervals per side");
  std::vector<Interval> sorted = flips;
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (sorted[i].hi > sorted[i + 1].lo + 1e-12)
      throw std::invalid_argument("flip set: intervals must be disjoint");
}

}  // namespace

std::optional<ContinuumSolution> build_discontinuous(std::vector<Interval> flips,
                                                     double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("build_discontinuous: beta must be > 0");
  validate_flips(flips);

  std::string note;
  std::vector<Interval> kept;
  for (const Interval& f : flips) {
    if (f.measure() > 1e-15)
      kept.push_back(f);
    else
      note = "zero-measure flip intervals dropped";
  }

  double flipped = 0.0;
  for (const Interval& f : kept) flipped += f.measure();

  if (kept.empty()) {
    // coincides with the continuous family almost everywhere
    const auto C = solve_C_continuous(beta);
    if (!C) return std::nullopt;
    ContinuumSolution sol;
    sol.kind = ContinuumKind::ContinuousStable;
    sol.C = *C;
    sol.beta = beta;
    sol.note = note.empty() ? "" : note + "; treated as the continuous family";
    return sol;
  }

  if (flipped >= 1.0 - 1e-12) {
    // the signed condition only has the negative root C = -C0, which is the
    // mirror profile pi + U written with the C0 > 0 convention
    const auto C = solve_C_continuous(beta);
    if (!C) return std::nullopt;
    ContinuumSolution sol;
    sol.kind = ContinuumKind::ContinuousMirror;
    sol.C = *C;
    sol.beta = beta;
    sol.flips = kept;
    sol.note = "full flip; continuous mirror family";
    return sol;
  }

  // positive root of R(C) = C on [beta/2, 1]; the lower limit keeps the
  // arcsin argument inside [-1,1] on all of [0,1]
  const double C_lo = 0.5 * beta * (1.0 + 1e-12);
  const double C_hi = 1.0;
  if (C_lo >= C_hi) return std::nullopt;
  auto g = [&](double C) { return signed_integral(kept, beta, C) - C; };

  constexpr int kScan = 512;
  double best = -1.0;
  double prev_c = C_lo;
  double prev_g = g(prev_c);
  for (int k = 1; k <= kScan; ++k) {
    const double c = C_lo + (C_hi - C_lo) * k / kScan;
    const double gc = g(c);
    if (gc == 0.0)
      best = c;
    else if (prev_g != 0.0 && (prev_g > 0.0) != (gc > 0.0))
      best = bisect_root(g, prev_c, c, 1e-13);
    prev_c = c;
    prev_g = gc;
  }
  if (best < 0.0) return std::nullopt;

  ContinuumSolution sol;
  sol.kind = ContinuumKind::Discontinuous;
  sol.C = best;
  sol.beta = beta;
  sol.flips = kept;
  sol.note = note;
  return sol;
}

double StepFunctionState::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return values.empty() ? 0.0 : std::sqrt(s / values.size());
}

StepFunctionState discretize(const ContinuumSolution& sol, int n) {
  if (n < 3 || n % 2 == 0)
    throw std::invalid_argument("discretize: n must be odd and >= 3");
  std::vector<double> knots;
  for (const Interval& f : sol.flips) {
    knots.push_back(f.lo);
    knots.push_back(f.hi);
  }
  const double edge = sol.C / sol.beta;
  if (edge < 0.5) {
    knots.push_back(0.5 - edge);
    knots.push_back(0.5 + edge);
  }
  StepFunctionState st;
  st.values.resize(n);
  for (int i = 1; i <= n; ++i) {
    const double lo = static_cast<double>(i - 1) / n;
    const double hi = static_cast<double>(i) / n;
    st.values[i - 1] =
        n * adaptive_simpson([&](double x) { return sol.profile(x); }, lo, hi, 1e-13,
                             knots);
  }
  return st;
}

double family_distance(const StepFunctionState& x, const StepFunctionState& y) {
  if (x.values.size() != y.values.size())
    throw std::invalid_argument("family_distance: states must have equal n");
  const std::size_t n = x.values.size();
  std::vector<double> d(n);
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = wrap_angle(x.values[i] - y.values[i]);
    s += std::sin(d[i]);
    c += std::cos(d[i]);
  }
  auto objective = [&](double theta) {
    double acc = 0.0;
    for (double di : d) {
      const double w = wrap_angle(di - theta);
      acc += w * w;
    }
    return acc / n;
  };

  // circular-mean seed plus a coarse scan; the objective is piecewise smooth
  // with kinks where a component crosses the cut
  double best_theta = std::atan2(s, c);
  double best_val = objective(best_theta);
  constexpr int kScan = 128;
  for (int k = 0; k < kScan; ++k) {
    const double theta = -kPi + kTwoPi * (k + 0.5) / kScan;
    const double val = objective(theta);
    if (val < best_val) {
      best_val = val;
      best_theta = theta;
    }
  }
  const double span = kTwoPi / kScan;
  const double theta_star =
      golden_min(objective, best_theta - span, best_theta + span, 1e-10);
  return std::sqrt(std::min(best_val, objective(theta_star)));
}

std::vector<Interval> sigma_flip_set(const SignSequence& sigma, int n) {
  if (2 * sigma.n0() + 1 != n)
    throw std::invalid_argument("sigma_flip_set: sigma length does not match n");
  const int n0 = sigma.n0();
  std::vector<Interval> out;
  // oscillator index of entry k (the middle oscillator carries no sign)
  auto oscillator = [&](int k) { return k <= n0 ? k : k + 1; };
  int k = 1;
  while (k <= 2 * n0) {
    if (sigma.sign(k) == 1) {
      ++k;
      continue;
    }
    int k2 = k;
    // runs stay within one half so intervals respect the x = 1/2 split
    const bool left = k <= n0;
    const int half_end = left ? n0 : 2 * n0;
    while (k2 + 1 <= half_end && sigma.sign(k2 + 1) == -1) ++k2;
    const int i1 = oscillator(k);
    const int i2 = oscillator(k2);
    Interval f;
    f.lo = (i1 == 1) ? 0.0 : (i1 == n0 + 2 ? 0.5 : (i1 - 0.5) / n);
    f.hi = (i2 == n) ? 1.0 : (i2 == n0 ? 0.5 : (i2 + 0.5) / n);
    out.push_back(f);
    k = k2 + 1;
  }
  return out;
}

std::optional<ContinuumSolution> match_discrete_to_continuum(const SignSequence& sigma,
                                                             const ModelConfig& cfg) {
  return build_discontinuous(sigma_flip_set(sigma, cfg.n), cfg.beta);
}

}  // namespace kmsync
