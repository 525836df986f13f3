#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kmsync/equilibria.hpp"
#include "kmsync/model.hpp"

namespace kmsync {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double measure() const { return hi - lo; }
};

enum class ContinuumKind { ContinuousStable, ContinuousMirror, Discontinuous };

const char* continuum_kind_name(ContinuumKind k);

// A stationary profile of the mean-field limit. C > 0 always; the mirror
// family stores the same C as the continuous one and flips the whole profile
// to pi + U(x).
struct ContinuumSolution {
  ContinuumKind kind = ContinuumKind::ContinuousStable;
  double C = 0.0;
  double beta = 0.0;              // a/K
  std::vector<Interval> flips;    // reflected-branch set, empty for continuous kinds
  std::string note;               // set when degenerate input was normalized

  // U(x) = arcsin(beta (x - 1/2) / C)
  double base_profile(double x) const;
  // Branch formula as a real number (not wrapped): U off the flip set,
  // pi - U on flips right of 1/2, -U - pi on flips left of 1/2, and pi + U
  // everywhere for the mirror kind.
  double profile(double x) const;
  bool in_flip(double x) const;
};

// arcsin(eta) + eta sqrt(1 - eta^2), monotone on [0,1] with range [0, pi/2].
double phi_eta(double eta);

// Unique C > 0 of the continuous consistency condition, or none for
// beta > pi/2 (no locked state below the critical coupling).
std::optional<double> solve_C_continuous(double beta);

ContinuumSolution continuous_solution(double beta);  // throws when none exists
ContinuumSolution mirror_solution(double beta);

// Solves the sign-flipped consistency condition
//   C = int_{[0,1] \ I} sqrt(1 - (beta (x-1/2)/C)^2) - int_I sqrt(...)
// by bisection in C with adaptive quadrature split at flip boundaries.
// Flip intervals must be disjoint, inside [0,1/2] or [1/2,1], at most 64 per
// side. Zero-measure intervals are dropped (an empty remainder is the
// continuous family). The full flip returns the mirror family through the
// negative root; partial flips without a positive root return none.
std::optional<ContinuumSolution> build_discontinuous(std::vector<Interval> flips,
                                                     double beta);

// Piecewise-constant function on the uniform n-cell partition of [0,1];
// the norm is the square-integrable one, |v|^2 = (1/n) sum v_i^2.
struct StepFunctionState {
  std::vector<double> values;
  double norm() const;
};

// Cell averages of the profile by adaptive quadrature; n odd.
StepFunctionState discretize(const ContinuumSolution& sol, int n);

// min over theta of |wrap(x - y - theta)| in the square-integrable norm,
// golden-section refined to 1e-10 from a circular-mean seed and a coarse
// scan of the circle.
double family_distance(const StepFunctionState& x, const StepFunctionState& y);

// Flip set whose indicator at the oscillator sample points reproduces sigma:
// maximal runs of -1 become intervals, snapped to 0, 1/2 and 1 at the ends so
// the all-minus sequence yields the full flip.
std::vector<Interval> sigma_flip_set(const SignSequence& sigma, int n);

// The stationary family the sigma-branch converges to, when its consistency
// condition is solvable at this beta.
std::optional<ContinuumSolution> match_discrete_to_continuum(const SignSequence& sigma,
                                                             const ModelConfig& cfg);

}  // namespace kmsync
