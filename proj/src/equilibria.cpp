#include "kmsync/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace kmsync {

namespace {

int coefficient_numerator(int i, int n0) {
  // (i - n0 - 1) for i <= n0, (i - n0) for i > n0; ranges over -n0..-1, 1..n0
  return (i <= n0) ? (i - n0 - 1) : (i - n0);
}

}  // namespace

SignSequence::SignSequence(std::vector<int> signs) : signs_(std::move(signs)) {
  const int m = static_cast<int>(signs_.size());
  if (m < 2 || m % 2 != 0)
    throw std::invalid_argument("SignSequence: length must be even and >= 2");
  for (int s : signs_)
    if (s != 1 && s != -1)
      throw std::invalid_argument("SignSequence: entries must be +1 or -1");
  const int half = m / 2;
  for (int i = 1; i <= half; ++i)
    if (signs_[i - 1] == signs_[m - i]) paired_.emplace_back(i, signs_[i - 1]);
}

SignSequence SignSequence::all_plus(int n0) {
  return SignSequence(std::vector<int>(2 * n0, 1));
}

SignSequence SignSequence::all_minus(int n0) {
  return SignSequence(std::vector<int>(2 * n0, -1));
}

SignSequence SignSequence::from_string(const std::string& text) {
  std::vector<int> signs;
  signs.reserve(text.size());
  for (std::size_t k = 0; k < text.size(); ++k) {
    if (text[k] == '+')
      signs.push_back(1);
    else if (text[k] == '-')
      signs.push_back(-1);
    else
      throw std::invalid_argument("sign sequence: invalid character at position " +
                                  std::to_string(k + 1) + " (expected '+' or '-')");
  }
  return SignSequence(std::move(signs));
}

SignSequence SignSequence::from_index(int n0, std::uint64_t index) {
  const int m = 2 * n0;
  std::vector<int> signs(m);
  for (int j = 1; j <= m; ++j) {
    const std::uint64_t bit = (index >> (m - j)) & 1u;
    signs[j - 1] = bit ? 1 : -1;
  }
  return SignSequence(std::move(signs));
}

int SignSequence::n_plus() const {
  int c = 0;
  for (int s : signs_)
    if (s == 1) ++c;
  return c;
}

bool SignSequence::all_ones() const {
  return n_plus() == size();
}

std::uint64_t SignSequence::index() const {
  std::uint64_t idx = 0;
  for (int s : signs_) idx = (idx << 1) | (s == 1 ? 1u : 0u);
  return idx;
}

std::string SignSequence::str() const {
  std::string s;
  s.reserve(signs_.size());
  for (int v : signs_) s.push_back(v == 1 ? '+' : '-');
  return s;
}

std::string SignSequence::pair_key() const {
  const int half = size() / 2;
  std::string key(half, 'U');
  for (const auto& [i, s] : paired_) key[i - 1] = (s == 1) ? 'P' : 'M';
  return key;
}

SignSequence SignSequence::pair_swapped(int i) const {
  const int m = size();
  if (i < 1 || i > m / 2)
    throw std::invalid_argument("pair_swapped: index out of range");
  if (signs_[i - 1] == signs_[m - i])
    throw std::invalid_argument("pair_swapped: pair is not unpaired");
  std::vector<int> s = signs_;
  s[i - 1] = -s[i - 1];
  s[m - i] = -s[m - i];
  return SignSequence(std::move(s));
}

std::vector<SignSequence> enumerate_sequences(int n0) {
  if (n0 < 1 || n0 > 12)
    throw std::invalid_argument("enumerate_sequences: n0 must be in [1,12], got " +
                                std::to_string(n0));
  const std::uint64_t total = 1ull << (2 * n0);
  std::vector<SignSequence> out;
  out.reserve(total);
  for (std::uint64_t k = 0; k < total; ++k) out.push_back(SignSequence::from_index(n0, k));
  return out;
}

double chi_eval(const SignSequence& sigma, double xi) {
  if (!(xi >= 0.0 && xi <= 1.0))
    throw std::domain_error("chi_eval: xi must lie in [0,1]");
  const int n0 = sigma.n0();
  double sum = 1.0;
  for (int i = 1; i <= 2 * n0; ++i) {
    const double c = static_cast<double>(coefficient_numerator(i, n0)) / n0;
    const double arg = c * xi;
    sum += sigma.sign(i) * std::sqrt(std::max(0.0, 1.0 - arg * arg));
  }
  return xi / n0 * sum;
}

// ---------------------------------------------------------------------------
// ChiCurve
// ---------------------------------------------------------------------------

ChiCurve::ChiCurve(SignSequence sigma, double xtol) : sigma_(std::move(sigma)) {
  // Paired-index evaluation: only indices with sigma_i = sigma_{2n0-i+1}
  // contribute; opposite pairs cancel term by term, which keeps the
  // derivative finite at xi = 1 when the corner pair is unpaired.
  const int n0 = sigma_.n0();
  for (const auto& [i, s] : sigma_.paired()) {
    coef_.push_back(static_cast<double>(n0 + 1 - i) / n0);
    psign_.push_back(s);
  }

  // sample points: uniform grid plus a geometric tail toward 1
  constexpr int kGrid = 4096;
  std::vector<double> pts;
  pts.reserve(kGrid + 24);
  for (int k = 1; k < kGrid; ++k) pts.push_back(static_cast<double>(k) / kGrid);
  for (int j = 1; j <= 24; ++j) pts.push_back(1.0 - std::ldexp(1.0 / kGrid, -j));

  auto sign_of = [](double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); };

  // extrema: sign changes of the derivative
  int prev = sign_of(deriv(pts[0]));
  double prev_x = pts[0];
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const int cur = sign_of(deriv(pts[k]));
    if (cur != 0 && prev != 0 && cur != prev) {
      const double xs =
          bisect_root([this](double x) { return deriv(x); }, prev_x, pts[k], xtol);
      const double val = chi(xs);
      if (std::fabs(val) >= 1e-10)  // on-axis candidates are zero crossings
        extrema_.push_back({xs, val, prev > 0});
    }
    if (cur != 0) {
      prev = cur;
      prev_x = pts[k];
    }
  }

  // interior zeros of chi (transversal crossings)
  prev = sign_of(chi(pts[0]));
  prev_x = pts[0];
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const int cur = sign_of(chi(pts[k]));
    if (cur != 0 && prev != 0 && cur != prev)
      zeros_.push_back(
          bisect_root([this](double x) { return chi(x); }, prev_x, pts[k], xtol));
    if (cur != 0) {
      prev = cur;
      prev_x = pts[k];
    }
  }
}

double ChiCurve::chi(double xi) const {
  double sum = 1.0;
  for (std::size_t k = 0; k < coef_.size(); ++k) {
    const double arg = coef_[k] * xi;
    sum += 2.0 * psign_[k] * std::sqrt(std::max(0.0, 1.0 - arg * arg));
  }
  return xi / sigma_.n0() * sum;
}

double ChiCurve::deriv(double xi) const {
  double sum = 1.0;
  for (std::size_t k = 0; k < coef_.size(); ++k) {
    const double arg2 = coef_[k] * coef_[k] * xi * xi;
    sum += 2.0 * psign_[k] * (1.0 - 2.0 * arg2) / std::sqrt(std::max(0.0, 1.0 - arg2));
  }
  return sum / sigma_.n0();
}

double ChiCurve::h(double xi) const {
  if (!(xi > 0.0 && xi < 1.0))
    throw std::domain_error("ChiCurve::h: xi must lie in (0,1)");
  double sum = 0.0;
  for (std::size_t k = 0; k < coef_.size(); ++k) {
    const double c2 = coef_[k] * coef_[k];
    sum += 2.0 * psign_[k] * c2 / std::sqrt(1.0 - c2 * xi * xi);
  }
  return sum / sigma_.n0();
}

std::vector<ChiExtremum> chi_extrema(const SignSequence& sigma, double tol) {
  return ChiCurve(sigma, tol).extrema();
}

std::vector<double> solve_xi_on(const ChiCurve& curve, double beta, double tol) {
  if (!(beta > 0.0)) throw std::invalid_argument("solve_xi: beta must be > 0");
  auto g = [&](double xi) { return std::fabs(curve.chi(xi)) - beta; };

  // |chi| is monotone between consecutive extrema and zero crossings
  std::vector<double> brk{0.0};
  for (const auto& e : curve.extrema()) brk.push_back(e.xi);
  for (double z : curve.zeros()) brk.push_back(z);
  brk.push_back(1.0);
  std::sort(brk.begin(), brk.end());

  std::vector<double> roots;
  auto push_root = [&](double x) {
    for (double r : roots)
      if (std::fabs(r - x) <= std::max(10.0 * tol, 1e-11)) return;
    roots.push_back(x);
  };

  double gl = -beta;  // chi(0) = 0
  for (std::size_t k = 0; k + 1 < brk.size(); ++k) {
    const double lo = brk[k], hi = brk[k + 1];
    if (hi - lo <= tol) continue;
    const double gr = g(hi);
    if (gr == 0.0) {
      push_root(hi);
    } else if (gl != 0.0 && (gl > 0.0) != (gr > 0.0)) {
      if (hi == 1.0) {
        // the slope of chi diverges like 1/sqrt(1-xi) at the branch point;
        // bisecting in t = sqrt(1-xi) keeps the function residual bounded
        auto gt = [&](double t) { return g(1.0 - t * t); };
        const double t_root =
            bisect_root(gt, 0.0, std::sqrt(1.0 - lo), 1e-10);
        const double root = 1.0 - t_root * t_root;
        push_root(1.0 - root < 5e-16 ? 1.0 : root);
      } else {
        push_root(bisect_root(g, lo, hi, tol));
      }
    }
    gl = gr;
  }

  // branch point: xi = 1 counts as a root when the endpoint value matches
  if (std::fabs(g(1.0)) <= 1e-9 * std::max(1.0, beta)) {
    bool near_one = false;
    for (double r : roots)
      if (std::fabs(r - 1.0) < 1e-6) near_one = true;
    if (!near_one) roots.push_back(1.0);
  }

  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<double> solve_xi(const SignSequence& sigma, double beta, double tol) {
  return solve_xi_on(ChiCurve(sigma, tol), beta, tol);
}

Equilibrium build_equilibrium(const SignSequence& sigma, double xi,
                              const ModelConfig& cfg) {
  if (sigma.n0() != cfg.n0)
    throw std::invalid_argument("build_equilibrium: sigma length does not match n");
  if (!(xi > 0.0 && xi <= 1.0))
    throw std::domain_error("build_equilibrium: xi must lie in (0,1]");
  const double chi = chi_eval(sigma, xi);
  // a root squeezed against xi = 1 can sit below the representable spacing,
  // where |chi| moves by ~sqrt(eps) per ulp, so the tolerance allows for that
  if (std::fabs(std::fabs(chi) - cfg.beta) > 1e-7 * std::max(1.0, cfg.beta))
    throw std::invalid_argument(
        "build_equilibrium: |chi(xi)| does not match a/K for this configuration");
  const int s = chi > 0.0 ? 1 : -1;

  Equilibrium eq{sigma, xi, s, {}, 0.0, cfg.K};
  const int n0 = cfg.n0;
  eq.v.resize(2 * n0);
  for (int i = 1; i <= 2 * n0; ++i) {
    const double c = static_cast<double>(coefficient_numerator(i, n0)) / n0;
    const double phi = s * std::asin(c * xi);
    if (sigma.sign(i) == 1)
      eq.v[i - 1] = phi;
    else
      eq.v[i - 1] = (phi > 0.0) ? kPi - phi : -phi - kPi;
  }
  eq.c_hat = s * n0 * cfg.a / (cfg.n * cfg.K * xi);
  return eq;
}

ModelConfig config_on_branch(const SignSequence& sigma, double xi, double a) {
  const double chi = chi_eval(sigma, xi);
  if (std::fabs(chi) < 1e-12)
    throw std::invalid_argument("config_on_branch: chi vanishes at this xi");
  return ModelConfig(2 * sigma.n0() + 1, a, a / std::fabs(chi));
}

std::vector<ChiClass> dedup_chi_classes(int n0) {
  const auto seqs = enumerate_sequences(n0);
  std::vector<ChiClass> classes;
  std::map<std::string, std::size_t> where;
  for (const auto& s : seqs) {
    const std::string key = s.pair_key();
    auto it = where.find(key);
    if (it == where.end()) {
      where.emplace(key, classes.size());
      classes.push_back({key, {s}});
    } else {
      classes[it->second].members.push_back(s);
    }
  }
  return classes;
}

std::optional<double> solve_CD(const ModelConfig& cfg) {
  if (!(cfg.beta > 0.0)) return std::nullopt;
  const auto roots = solve_xi(SignSequence::all_plus(cfg.n0), cfg.beta);
  if (roots.empty()) return std::nullopt;
  return static_cast<double>(cfg.n0) / cfg.n * cfg.beta / roots.front();
}

}  // namespace kmsync
