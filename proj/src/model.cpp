#include "kmsync/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kmsync {

ModelConfig::ModelConfig(int n_, double a_, double K_)
    : n(n_), n0((n_ - 1) / 2), a(a_), K(K_), nu(a_ / n_), beta(a_ / K_) {
  if (n < 3 || n % 2 == 0)
    throw std::invalid_argument("ModelConfig: n must be odd and >= 3, got " +
                                std::to_string(n));
  if (!(a >= 0.0)) throw std::invalid_argument("ModelConfig: a must be >= 0");
  if (!(K > 0.0)) throw std::invalid_argument("ModelConfig: K must be > 0");
}

ModelConfig ModelConfig::from_ratio(int n, double K_over_a, double a) {
  if (!(K_over_a > 0.0))
    throw std::invalid_argument("ModelConfig: K/a must be > 0");
  return ModelConfig(n, a, K_over_a * a);
}

FrequencyProfile make_frequency_profile(const ModelConfig& cfg) {
  FrequencyProfile f;
  f.omegas.resize(cfg.n);
  for (int i = 1; i <= cfg.n; ++i)
    f.omegas[i - 1] = cfg.a * (2.0 * i - cfg.n - 1.0) / (2.0 * cfg.n);
  double sum = 0.0;
  for (double w : f.omegas) sum += w;
  f.Omega_D = sum / cfg.n;
  return f;
}

ReducedState reduce(const FullState& u, const ModelConfig& cfg) {
  if (static_cast<int>(u.u.size()) != cfg.n)
    throw std::invalid_argument("reduce: state has wrong dimension");
  ReducedState r;
  r.v.resize(2 * cfg.n0);
  const double ref = u.u[cfg.n0];  // u_{n0+1}
  for (int i = 1; i <= 2 * cfg.n0; ++i) {
    const int full = (i <= cfg.n0) ? i : i + 1;
    r.v[i - 1] = wrap_angle(u.u[full - 1] - ref);
  }
  return r;
}

FullState lift(const ReducedState& v, double theta, const ModelConfig& cfg) {
  if (static_cast<int>(v.v.size()) != 2 * cfg.n0)
    throw std::invalid_argument("lift: state has wrong dimension");
  FullState f;
  f.u.resize(cfg.n);
  for (int i = 1; i <= cfg.n; ++i) {
    double vi = 0.0;
    if (i <= cfg.n0)
      vi = v.v[i - 1];
    else if (i >= cfg.n0 + 2)
      vi = v.v[i - 2];
    f.u[i - 1] = wrap_angle(vi + theta);
  }
  return f;
}

std::vector<double> vector_field(const FullState& u, const ModelConfig& cfg,
                                 const FrequencyProfile& freq) {
  const int n = cfg.n;
  if (static_cast<int>(u.u.size()) != n)
    throw std::invalid_argument("vector_field: state has wrong dimension");
  if (static_cast<int>(freq.omegas.size()) != n)
    throw std::invalid_argument("vector_field: frequency profile has wrong dimension");
  // sum_j sin(u_j - u_i) = cos(u_i) sum_j sin(u_j) - sin(u_i) sum_j cos(u_j)
  double S = 0.0, C = 0.0;
  std::vector<double> si(n), ci(n);
  for (int i = 0; i < n; ++i) {
    si[i] = std::sin(u.u[i]);
    ci[i] = std::cos(u.u[i]);
    S += si[i];
    C += ci[i];
  }
  std::vector<double> out(n);
  const double g = cfg.K / n;
  for (int i = 0; i < n; ++i) out[i] = freq.omegas[i] + g * (S * ci[i] - C * si[i]);
  return out;
}

std::vector<double> reduced_vector_field(const ReducedState& v, const ModelConfig& cfg) {
  const int m = 2 * cfg.n0;
  if (static_cast<int>(v.v.size()) != m)
    throw std::invalid_argument("reduced_vector_field: state has wrong dimension");
  std::vector<double> sv(m), out(m);
  for (int j = 0; j < m; ++j) sv[j] = std::sin(v.v[j]);
  const double g = cfg.K / cfg.n;
  for (int i = 1; i <= m; ++i) {
    const int drift = (i <= cfg.n0) ? (i - cfg.n0 - 1) : (i - cfg.n0);
    double coupling = 2.0 * sv[i - 1];
    for (int j = 1; j <= m; ++j) {
      if (j == i) continue;
      coupling += sv[j - 1] - std::sin(v.v[j - 1] - v.v[i - 1]);
    }
    out[i - 1] = drift * cfg.nu - g * coupling;
  }
  return out;
}

Matrix jacobian(const ReducedState& v, const ModelConfig& cfg) {
  const int n = cfg.n;
  if (static_cast<int>(v.v.size()) != 2 * cfg.n0)
    throw std::invalid_argument("jacobian: state has wrong dimension");
  // angles of all n oscillators relative to the middle one
  std::vector<double> w(n, 0.0);
  for (int i = 1; i <= n; ++i) {
    if (i <= cfg.n0)
      w[i - 1] = v.v[i - 1];
    else if (i >= cfg.n0 + 2)
      w[i - 1] = v.v[i - 2];
  }
  Matrix A(n);
  const double g = cfg.K / n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double c = g * std::cos(w[j] - w[i]);
      A(i, j) = c;
      A(j, i) = c;
    }
  }
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) row += A(i, j);
    A(i, i) = -row;
  }
  return A;
}

}  // namespace kmsync
