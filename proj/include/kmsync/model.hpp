#pragma once

#include <vector>

#include "kmsync/numerics.hpp"

namespace kmsync {

// Parameters of the all-to-all Kuramoto system with evenly spaced natural
// frequencies. n is odd, n0 = (n-1)/2; beta = a/K is the dimensionless
// control ratio and nu = a/n the frequency gap between neighbours.
struct ModelConfig {
  int n;
  int n0;
  double a;
  double K;
  double nu;
  double beta;

  ModelConfig(int n_, double a_, double K_);
  static ModelConfig from_ratio(int n, double K_over_a, double a = 1.0);
};

// omega_i = a (2i - n - 1) / (2n), antisymmetric about the middle index,
// zero mean.
struct FrequencyProfile {
  std::vector<double> omegas;
  double Omega_D;
};
FrequencyProfile make_frequency_profile(const ModelConfig& cfg);

// Full phase state, n angles.
struct FullState {
  std::vector<double> u;
};

// Phase differences v_i = u_i - u_{n0+1} with the middle oscillator removed:
// index i <= n0 maps to u_i, index i > n0 maps to u_{i+1}. 2 n0 angles.
struct ReducedState {
  std::vector<double> v;
};

// Both directions of the change of variables; all angles land in (-pi, pi].
ReducedState reduce(const FullState& u, const ModelConfig& cfg);
FullState lift(const ReducedState& v, double theta, const ModelConfig& cfg);

// du_i/dt = omega_i + (K/n) sum_j sin(u_j - u_i). The components sum to
// n * Omega_D = 0 exactly.
std::vector<double> vector_field(const FullState& u, const ModelConfig& cfg,
                                 const FrequencyProfile& freq);

// The same flow written in the difference variables.
std::vector<double> reduced_vector_field(const ReducedState& v, const ModelConfig& cfg);

// Jacobian of the full vector field at the state lifted from v, assembled in
// n x n form. Exactly symmetric with zero row sums, so (1,...,1) is always a
// zero eigenvector.
Matrix jacobian(const ReducedState& v, const ModelConfig& cfg);

}  // namespace kmsync
