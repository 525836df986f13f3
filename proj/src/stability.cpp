#include "kmsync/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kmsync {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Unstable: return "unstable";
    case Verdict::Marginal: return "marginal";
  }
  return "?";
}

StabilityReport spectrum(const Matrix& A, double zero_tol) {
  const EigenSystem es = jacobi_eigensystem(A);
  StabilityReport rep;
  rep.eigenvalues = es.values;
  double radius = 0.0;
  for (double lam : es.values) radius = std::max(radius, std::fabs(lam));
  rep.zero_tol = zero_tol > 0.0 ? zero_tol : 1e-8 * std::max(1.0, radius);
  for (double lam : es.values) {
    if (lam > rep.zero_tol)
      ++rep.l_plus;
    else if (lam < -rep.zero_tol)
      ++rep.l_minus;
    else
      ++rep.l_zero;
  }
  if (rep.l_plus >= 1)
    rep.verdict = Verdict::Unstable;
  else if (rep.l_zero >= 2)
    rep.verdict = Verdict::Marginal;
  else
    rep.verdict = Verdict::Stable;
  return rep;
}

StabilityReport stability_at(const Equilibrium& eq, const ModelConfig& cfg) {
  return spectrum(jacobian(ReducedState{eq.v}, cfg));
}

int LimitMatrixSpec::predicted_positive() const {
  return std::min(n_minus, n_plus + 1);
}

LimitMatrixSpec limit_matrix_spec(const SignSequence& sigma) {
  LimitMatrixSpec spec;
  spec.n_plus = sigma.n_plus();
  spec.n_minus = sigma.n_minus();
  spec.n_hat = sigma.n0() - spec.n_plus;
  const int n = sigma.size() + 1;
  spec.predicted.emplace_back(0.0, 1);
  if (spec.n_minus == 0) {
    spec.predicted.emplace_back(-n, n - 1);
  } else {
    spec.predicted.emplace_back(n, 1);
    if (spec.n_plus > 0)
      spec.predicted.emplace_back(2 * spec.n_hat - 1, spec.n_plus);
    if (spec.n_minus > 1)
      spec.predicted.emplace_back(-2 * spec.n_hat + 1, spec.n_minus - 1);
  }
  std::sort(spec.predicted.begin(), spec.predicted.end());
  return spec;
}

Matrix limit_matrix_a0(const SignSequence& sigma) {
  // rows/columns reordered so the n_plus + 1 cosine-aligned oscillators
  // (including the reference) come first; entry (i,j) -> s_i s_j off the
  // diagonal, diagonal 1 - s_i * sum(s)
  const int n = sigma.size() + 1;
  const int npos = sigma.n_plus() + 1;
  std::vector<int> s(n, -1);
  for (int i = 0; i < npos; ++i) s[i] = 1;
  int S = 0;
  for (int v : s) S += v;
  Matrix A(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      A(i, j) = (i == j) ? (1.0 - s[i] * S) : (s[i] * s[j]);
  }
  return A;
}

LimitMatrixCheck limit_matrix_check(const SignSequence& sigma, const ModelConfig& cfg) {
  LimitMatrixCheck out;
  out.spec = limit_matrix_spec(sigma);

  const Matrix A0 = limit_matrix_a0(sigma);
  out.a0_eigenvalues = jacobi_eigensystem(A0).values;

  // expand the predicted multiset and compare entrywise
  std::vector<double> expect;
  for (const auto& [lam, mult] : out.spec.predicted)
    for (int k = 0; k < mult; ++k) expect.push_back(lam);
  std::sort(expect.begin(), expect.end());
  out.spectrum_matches = expect.size() == out.a0_eigenvalues.size();
  if (out.spectrum_matches)
    for (std::size_t k = 0; k < expect.size(); ++k)
      if (std::fabs(expect[k] - out.a0_eigenvalues[k]) > 1e-9) out.spectrum_matches = false;

  // integer eigenvalues are separated by at least 1, so 0.25 splits the bins
  const double count_tol = 0.25;
  for (double lam : out.a0_eigenvalues) {
    if (lam > count_tol) ++out.a0_l_plus;
    if (std::fabs(lam) <= count_tol) ++out.a0_l_zero;
  }

  // true Jacobian close to the coupling-dominated end of the branch
  const double xi = 1e-3;
  const ModelConfig branch_cfg = config_on_branch(sigma, xi, cfg.a);
  const Equilibrium eq = build_equilibrium(sigma, xi, branch_cfg);
  Matrix J = jacobian(ReducedState{eq.v}, branch_cfg);
  const double scale = branch_cfg.n / branch_cfg.K;
  for (double& v : J.a) v *= scale;
  for (double lam : jacobi_eigensystem(J).values) {
    if (lam > count_tol) ++out.jac_l_plus;
    if (std::fabs(lam) <= count_tol) ++out.jac_l_zero;
  }
  out.counts_match =
      out.jac_l_plus == out.a0_l_plus && out.jac_l_zero == out.a0_l_zero &&
      out.a0_l_plus == out.spec.predicted_positive() && out.a0_l_zero == 1;
  return out;
}

double all_plus_fold_xi(int n0) {
  const auto ext = ChiCurve(SignSequence::all_plus(n0)).extrema();
  if (ext.size() != 1 || !ext.front().is_max)
    throw std::runtime_error("all_plus_fold_xi: expected a single maximum");
  return ext.front().xi;
}

Verdict stability_rule(const SignSequence& sigma, double xi, double xi0) {
  if (!sigma.all_ones()) return Verdict::Unstable;
  if (std::fabs(xi - xi0) < 1e-6) return Verdict::Marginal;
  return xi < xi0 ? Verdict::Stable : Verdict::Unstable;
}

Verdict stability_rule(const SignSequence& sigma, double xi, const ModelConfig& cfg) {
  if (!sigma.all_ones()) return Verdict::Unstable;
  return stability_rule(sigma, xi, all_plus_fold_xi(cfg.n0));
}

double h_sigma(const SignSequence& sigma, double xi) {
  return ChiCurve(sigma).h(xi);  // throws outside (0,1)
}

Verdict n3_closed_form_stability(double v1, double v2) {
  const double c1 = std::cos(v1);
  const double c2 = std::cos(v2);
  const double c12 = std::cos(v2 - v1);
  const double trace_like = -c1 - c2 - c12;
  const double det_like = c1 * c2 + (c1 + c2) * c12;
  if (trace_like > 0.0 || det_like < 0.0) return Verdict::Unstable;
  if (trace_like < 0.0 && det_like > 0.0) return Verdict::Stable;
  return Verdict::Marginal;
}

}  // namespace kmsync
