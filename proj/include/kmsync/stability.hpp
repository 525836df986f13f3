#pragma once

#include <utility>
#include <vector>

#include "kmsync/equilibria.hpp"
#include "kmsync/model.hpp"
#include "kmsync/numerics.hpp"

namespace kmsync {

enum class Verdict { Stable, Unstable, Marginal };

const char* verdict_name(Verdict v);

// Signed eigenvalue counts of a symmetric Jacobian. "Stable" means stable as
// a one-parameter family: exactly the rotation zero mode and everything else
// negative.
struct StabilityReport {
  std::vector<double> eigenvalues;  // ascending
  int l_plus = 0;
  int l_zero = 0;
  int l_minus = 0;
  Verdict verdict = Verdict::Marginal;
  double zero_tol = 0.0;
};

// Eigenvalues by cyclic Jacobi rotations; the input must be symmetric within
// 1e-12. zero_tol <= 0 selects 1e-8 * max(1, spectral radius).
StabilityReport spectrum(const Matrix& A, double zero_tol = 0.0);

// Jacobian + spectrum at an equilibrium.
StabilityReport stability_at(const Equilibrium& eq, const ModelConfig& cfg);

// Integer spectrum of the scaled coupling-dominated limit of the Jacobian,
// with all +1 oscillators (and the reference) ordered first.
struct LimitMatrixSpec {
  int n_plus = 0;
  int n_minus = 0;
  int n_hat = 0;  // n0 - n_plus
  std::vector<std::pair<double, int>> predicted;  // (eigenvalue, multiplicity)
  int predicted_positive() const;                 // min(n_minus, n_plus + 1)
};

LimitMatrixSpec limit_matrix_spec(const SignSequence& sigma);
Matrix limit_matrix_a0(const SignSequence& sigma);

struct LimitMatrixCheck {
  LimitMatrixSpec spec;
  std::vector<double> a0_eigenvalues;
  bool spectrum_matches = false;  // numeric A0 spectrum equals the prediction
  int a0_l_plus = 0, a0_l_zero = 0;
  int jac_l_plus = 0, jac_l_zero = 0;  // scaled true Jacobian at xi = 1e-3
  bool counts_match = false;
};

// Builds A0 explicitly, diagonalizes it, compares against the case-list
// prediction, and checks that the true Jacobian at xi = 1e-3 on the sigma
// branch carries the same positive/zero counts.
LimitMatrixCheck limit_matrix_check(const SignSequence& sigma, const ModelConfig& cfg);

// Stable iff sigma is all-plus and xi < xi0 (the fold of the all-plus
// branch); within 1e-6 of xi0 the verdict is marginal.
Verdict stability_rule(const SignSequence& sigma, double xi, double xi0);
Verdict stability_rule(const SignSequence& sigma, double xi, const ModelConfig& cfg);

// Fold location of the all-plus branch for the given n0.
double all_plus_fold_xi(int n0);

double h_sigma(const SignSequence& sigma, double xi);

// Closed-form n = 3 stability test in the two difference angles.
Verdict n3_closed_form_stability(double v1, double v2);

}  // namespace kmsync
