#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kmsync/equilibria.hpp"
#include "kmsync/stability.hpp"

namespace kmsync {

enum class BifurcationKind { SaddleNode, Pitchfork };
enum class Criticality { Supercritical, Subcritical, Indeterminate };

const char* kind_name(BifurcationKind k);
const char* criticality_name(Criticality c);

struct BifurcationEvent {
  BifurcationKind kind = BifurcationKind::SaddleNode;
  double K_star = 0.0;   // a / |chi(xi_star)|
  double xi_star = 0.0;  // in (0,1) for folds, 1 for branch points
  Criticality criticality = Criticality::Indeterminate;
  std::vector<SignSequence> participants;  // 1 for folds, the corner quadruple otherwise
  int degeneracy_order = 1;  // order of the first nonvanishing one-sided derivative
};

// One fold per local extremum of |chi| on (0,1); supercritical at maxima of
// |chi|, subcritical at minima.
std::vector<BifurcationEvent> detect_saddle_nodes(const SignSequence& sigma,
                                                  const ModelConfig& cfg);

// The four sequences agreeing off indices {1, 2n0} with the corner signs
// (+,+), (+,-), (-,+), (-,-), in that order.
struct PitchforkQuadruple {
  SignSequence pp, pm, mp, mm;
};
// Quadruple generated from any member sequence.
PitchforkQuadruple corner_quadruple(const SignSequence& sigma);

// Branch point at xi = 1 shared by the quadruple; none when chi(1) = 0.
// Criticality comes from the sign of chi(1) * d^j chi/dxi^j (1) along the
// (+,-) member, where the derivative is finite; j escalates through one-sided
// Richardson differences while lower orders vanish, and gives up as
// indeterminate past order 4.
std::optional<BifurcationEvent> detect_pitchforks(const PitchforkQuadruple& quad,
                                                  const ModelConfig& cfg);

struct EventCounts {
  std::uint64_t distinct_families = 0;  // 2^{2n0}
  std::uint64_t coarse_families = 0;    // corner (+,+)/(-,-) branches identified
  std::uint64_t saddle_nodes = 0;
  std::uint64_t pitchforks = 0;
  // lower bounds the enumeration is checked against (0 when not applicable)
  std::uint64_t saddle_node_bound = 0;
  std::uint64_t pitchfork_bound = 0;
  std::uint64_t pitchfork_prime_bound = 0;
};

// Exhaustive event counting over all sign sequences.
EventCounts count_events(int n0);

struct DiagramRow {
  double K = 0.0;
  std::uint64_t sigma_id = 0;
  std::string sigma;
  double xi = 0.0;
  int component = 0;  // 1-based index into v
  double v_value = 0.0;
  char flag = 'u';  // 's' stable, 'u' unstable, 'm' marginal
};

// Equilibrium components with spectral stability flags across a K sweep;
// rows sorted by (sigma_id, K, xi, component).
std::vector<DiagramRow> branch_diagram(int n0, double K_min, double K_max,
                                       int samples, double a = 1.0);

}  // namespace kmsync
