#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kmsync/model.hpp"

namespace kmsync {

// One element of {-1,+1}^{2n0}. Entry i selects the principal (+1) or
// reflected (-1) arcsin branch of oscillator i in the difference variables.
class SignSequence {
 public:
  explicit SignSequence(std::vector<int> signs);
  static SignSequence all_plus(int n0);
  static SignSequence all_minus(int n0);
  // '+'/'-' characters, entry 1 leftmost. Reports the position (1-based) of
  // the first bad character on failure.
  static SignSequence from_string(const std::string& text);
  // Lexicographic enumeration index with -1 ordered before +1.
  static SignSequence from_index(int n0, std::uint64_t index);

  int size() const { return static_cast<int>(signs_.size()); }
  int n0() const { return size() / 2; }
  int sign(int i) const { return signs_[i - 1]; }  // 1-based
  int n_plus() const;
  int n_minus() const { return size() - n_plus(); }
  bool all_ones() const;
  std::uint64_t index() const;
  std::string str() const;

  // Pairs (i, sigma_i) with sigma_i == sigma_{2n0-i+1}, i in [n0]. This data
  // determines chi completely; indices with opposite partners drop out.
  const std::vector<std::pair<int, int>>& paired() const { return paired_; }
  // One character per i in [n0]: 'P' paired +, 'M' paired -, 'U' unpaired.
  std::string pair_key() const;

  // Swaps an unpaired pair (sigma_i, sigma_{2n0-i+1}) to the opposite
  // unpaired assignment; i must be unpaired.
  SignSequence pair_swapped(int i) const;

  friend bool operator==(const SignSequence& a, const SignSequence& b) {
    return a.signs_ == b.signs_;
  }

 private:
  std::vector<int> signs_;
  std::vector<std::pair<int, int>> paired_;
};

// All 2^{2n0} sequences in lexicographic order. Guarded to n0 <= 12.
std::vector<SignSequence> enumerate_sequences(int n0);

// chi evaluated from its defining 2n0-term sum; xi in [0,1].
double chi_eval(const SignSequence& sigma, double xi);

struct ChiExtremum {
  double xi;
  double value;  // chi at the extremum
  bool is_max;   // extremum kind of chi itself, not |chi|
};

// Scalar branch function chi of one sign sequence together with its
// derivative, the h function from the fold criticality analysis, and cached
// extrema / interior zeros on (0,1).
//
// Evaluations use the paired-index form, whose terms stay finite at xi = 1
// whenever the corner pair is unpaired; the raw sum would produce inf - inf
// there. Extrema are located by derivative sign changes on a 4096-point grid
// of (0,1) plus a geometric tail toward 1 (the derivative diverges at 1 for
// paired corners), each refined by bisection.
class ChiCurve {
 public:
  explicit ChiCurve(SignSequence sigma, double xtol = 1e-12);

  double chi(double xi) const;
  double deriv(double xi) const;  // dchi/dxi; finite at 1 only for unpaired corners
  double h(double xi) const;      // chi/xi - deriv = h * xi^2 on (0,1)

  const SignSequence& sigma() const { return sigma_; }
  const std::vector<ChiExtremum>& extrema() const { return extrema_; }
  const std::vector<double>& zeros() const { return zeros_; }

 private:
  SignSequence sigma_;
  std::vector<double> coef_;   // (n0+1-i_k)/n0 for each paired index
  std::vector<int> psign_;     // sign of each paired index
  std::vector<ChiExtremum> extrema_;
  std::vector<double> zeros_;
};

std::vector<ChiExtremum> chi_extrema(const SignSequence& sigma, double tol = 1e-12);

// All roots of |chi(xi)| = beta on (0,1], each bracketed between consecutive
// extrema/zeros and refined by bisection. xi = 1 is reported when the branch
// point value matches beta. No roots is a valid (empty) result.
std::vector<double> solve_xi(const SignSequence& sigma, double beta, double tol = 1e-12);
// Same, reusing an already-built curve across a K sweep.
std::vector<double> solve_xi_on(const ChiCurve& curve, double beta, double tol = 1e-12);

struct Equilibrium {
  SignSequence sigma;
  double xi = 0.0;
  int chi_sign = 0;        // sign of chi at xi
  std::vector<double> v;   // 2n0 angles in (-pi, pi]
  double c_hat = 0.0;      // signed order parameter, (n0/n) chi(xi)/xi
  double K = 0.0;
};

// Materializes the phase vector for (sigma, xi); requires |chi(xi)| = a/K
// within solver tolerance.
Equilibrium build_equilibrium(const SignSequence& sigma, double xi,
                              const ModelConfig& cfg);

// Convenience: the configuration on the sigma-branch at a given xi, i.e.
// K = a / |chi(xi)|.
ModelConfig config_on_branch(const SignSequence& sigma, double xi, double a = 1.0);

// Partition of all sequences into classes sharing one chi function.
struct ChiClass {
  std::string key;  // pair_key of the members
  std::vector<SignSequence> members;
};
std::vector<ChiClass> dedup_chi_classes(int n0);

// The classical order parameter C_D of the all-plus branch (largest root of
// the consistency condition), when it exists for this beta.
std::optional<double> solve_CD(const ModelConfig& cfg);

}  // namespace kmsync
