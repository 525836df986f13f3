#include "kmsync/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kmsync {

const char* kind_name(BifurcationKind k) {
  return k == BifurcationKind::SaddleNode ? "saddle-node" : "pitchfork";
}

const char* criticality_name(Criticality c) {
  switch (c) {
    case Criticality::Supercritical: return "supercritical";
    case Criticality::Subcritical: return "subcritical";
    case Criticality::Indeterminate: return "indeterminate";
  }
  return "?";
}

std::vector<BifurcationEvent> detect_saddle_nodes(const SignSequence& sigma,
                                                  const ModelConfig& cfg) {
  std::vector<BifurcationEvent> events;
  const ChiCurve curve(sigma);
  for (const ChiExtremum& e : curve.extrema()) {
    BifurcationEvent ev;
    ev.kind = BifurcationKind::SaddleNode;
    ev.xi_star = e.xi;
    ev.K_star = cfg.a / std::fabs(e.value);
    // maximum of |chi|: a chi-maximum above the axis or a chi-minimum below
    const bool abs_max = (e.value > 0.0) == e.is_max;
    ev.criticality = abs_max ? Criticality::Supercritical : Criticality::Subcritical;
    ev.participants = {sigma};
    events.push_back(std::move(ev));
  }
  return events;
}

PitchforkQuadruple corner_quadruple(const SignSequence& sigma) {
  const int m = sigma.size();
  auto with_corners = [&](int first, int last) {
    std::vector<int> s;
    s.reserve(m);
    for (int i = 1; i <= m; ++i) s.push_back(sigma.sign(i));
    s[0] = first;
    s[m - 1] = last;
    return SignSequence(std::move(s));
  };
  return PitchforkQuadruple{with_corners(1, 1), with_corners(1, -1),
                            with_corners(-1, 1), with_corners(-1, -1)};
}

namespace {

void check_quadruple(const PitchforkQuadruple& q) {
  const int m = q.pp.size();
  auto same_middle = [&](const SignSequence& a, const SignSequence& b) {
    for (int i = 2; i < m; ++i)
      if (a.sign(i) != b.sign(i)) return false;
    return true;
  };
  const bool ok =
      same_middle(q.pp, q.pm) && same_middle(q.pp, q.mp) && same_middle(q.pp, q.mm) &&
      q.pp.sign(1) == 1 && q.pp.sign(m) == 1 && q.pm.sign(1) == 1 &&
      q.pm.sign(m) == -1 && q.mp.sign(1) == -1 && q.mp.sign(m) == 1 &&
      q.mm.sign(1) == -1 && q.mm.sign(m) == -1;
  if (!ok)
    throw std::invalid_argument(
        "detect_pitchforks: sequences must agree off the corner indices and "
        "enumerate the four corner sign pairs");
}

}  // namespace

std::optional<BifurcationEvent> detect_pitchforks(const PitchforkQuadruple& quad,
                                                  const ModelConfig& cfg) {
  check_quadruple(quad);
  // the corner terms vanish at xi = 1, so all four members share chi(1)
  const double chi1 = chi_eval(quad.pm, 1.0);
  if (std::fabs(chi1) <= 1e-10) return std::nullopt;

  BifurcationEvent ev;
  ev.kind = BifurcationKind::Pitchfork;
  ev.xi_star = 1.0;
  ev.K_star = cfg.a / std::fabs(chi1);
  ev.participants = {quad.pp, quad.pm, quad.mp, quad.mm};

  // derivative along the (+,-) member, where the corner square roots cancel;
  // one-sided steps {1e-4, 5e-5, 2.5e-5} via Richardson
  const ChiCurve curve(quad.pm);
  auto f = [&](double x) { return curve.chi(x); };
  const double base_h = 1e-4;
  const double thresholds[] = {1e-7, 1e-5, 1e-3, 1e-2};
  ev.criticality = Criticality::Indeterminate;
  for (int order = 1; order <= 4; ++order) {
    const double d = backward_derivative(f, 1.0, order, base_h);
    if (std::fabs(d) > thresholds[order - 1]) {
      ev.degeneracy_order = order;
      ev.criticality =
          (chi1 * d > 0.0) ? Criticality::Supercritical : Criticality::Subcritical;
      break;
    }
  }
  if (ev.criticality == Criticality::Indeterminate) ev.degeneracy_order = 4;
  return ev;
}

EventCounts count_events(int n0) {
  const auto seqs = enumerate_sequences(n0);  // also validates the guard
  EventCounts out;
  out.distinct_families = seqs.size();

  const std::uint64_t quadruples = seqs.size() / 4;
  out.coarse_families = 3 * quadruples;

  // folds, one scan per sequence
  std::vector<std::uint64_t> folds(seqs.size());
  parallel_for(seqs.size(), [&](std::size_t k) {
    const ChiCurve curve(seqs[k]);
    std::uint64_t c = 0;
    for (const ChiExtremum& e : curve.extrema())
      if (std::fabs(e.value) > 1e-10) ++c;
    folds[k] = c;
  });
  for (std::uint64_t c : folds) out.saddle_nodes += c;

  // branch points, one test per corner quadruple (chi(1) is corner-blind)
  const ModelConfig cfg(2 * n0 + 1, 1.0, 1.0);
  for (std::uint64_t mid = 0; mid < quadruples; ++mid) {
    std::vector<int> s(2 * n0, 1);
    for (int j = 0; j < 2 * n0 - 2; ++j)
      s[1 + j] = ((mid >> (2 * n0 - 3 - j)) & 1u) ? 1 : -1;
    if (detect_pitchforks(corner_quadruple(SignSequence(s)), cfg)) ++out.pitchforks;
  }

  out.saddle_node_bound = 1ull << (2 * (n0 - 1));
  if (n0 >= 2) {
    out.pitchfork_bound = (1ull << (2 * n0 - 3)) +
                          (1ull << (n0 - 2)) * static_cast<std::uint64_t>(n0);
    auto is_prime = [](int m) {
      if (m < 2) return false;
      for (int d = 2; d * d <= m; ++d)
        if (m % d == 0) return false;
      return true;
    };
    if (is_prime(n0)) out.pitchfork_prime_bound = 1ull << (2 * (n0 - 1));
  }
  return out;
}

std::vector<DiagramRow> branch_diagram(int n0, double K_min, double K_max,
                                       int samples, double a) {
  if (!(K_min > 0.0) || !(K_max > K_min))
    throw std::invalid_argument("branch_diagram: K range must be positive and increasing");
  if (samples < 2) throw std::invalid_argument("branch_diagram: samples must be >= 2");

  const auto seqs = enumerate_sequences(n0);
  const int n = 2 * n0 + 1;
  std::vector<std::vector<DiagramRow>> blocks(seqs.size());

  parallel_for(seqs.size(), [&](std::size_t k) {
    const SignSequence& sigma = seqs[k];
    const ChiCurve curve(sigma);
    auto& rows = blocks[k];
    for (int m = 0; m < samples; ++m) {
      const double K = K_min + (K_max - K_min) * m / (samples - 1);
      const ModelConfig cfg(n, a, K);
      for (double xi : solve_xi_on(curve, cfg.beta)) {
        const Equilibrium eq = build_equilibrium(sigma, xi, cfg);
        const StabilityReport rep = stability_at(eq, cfg);
        const char flag = rep.verdict == Verdict::Stable
                              ? 's'
                              : (rep.verdict == Verdict::Unstable ? 'u' : 'm');
        for (int c = 1; c <= 2 * n0; ++c)
          rows.push_back({K, sigma.index(), sigma.str(), xi, c, eq.v[c - 1], flag});
      }
    }
  });

  std::vector<DiagramRow> out;
  for (auto& b : blocks)
    out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace kmsync
