#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kmsync/bifurcation.hpp"
#include "kmsync/continuum.hpp"
#include "kmsync/dynamics.hpp"
#include "kmsync/equilibria.hpp"
#include "kmsync/model.hpp"
#include "kmsync/selfcheck.hpp"
#include "kmsync/stability.hpp"

namespace {

using json = nlohmann::json;
using namespace kmsync;

// Tabular payload shared by the CSV and JSON writers. Cells stay typed so
// JSON output keeps numbers as numbers.
struct Table {
  std::vector<std::pair<std::string, json>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

std::string cell_text(const json& v) {
  if (v.is_number_float()) return format_g15(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void write_csv(const Table& t, std::ostream& os) {
  for (const auto& [k, v] : t.meta) os << "# " << k << "=" << cell_text(v) << "\n";
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    os << t.columns[c] << (c + 1 < t.columns.size() ? "," : "\n");
  for (const auto& row : t.rows)
    for (std::size_t c = 0; c < row.size(); ++c)
      os << cell_text(row[c]) << (c + 1 < row.size() ? "," : "\n");
}

void write_json(const Table& t, std::ostream& os) {
  json meta = json::object();
  for (const auto& [k, v] : t.meta) meta[k] = v;
  json data = json::array();
  for (const auto& row : t.rows) {
    json obj = json::object();
    for (std::size_t c = 0; c < row.size(); ++c) obj[t.columns[c]] = row[c];
    data.push_back(obj);
  }
  os << json{{"meta", meta}, {"data", data}}.dump(2) << "\n";
}

struct OutputOptions {
  std::string format = "csv";
  std::string path;
};

void emit(const Table& t, const OutputOptions& out) {
  std::ostringstream buf;
  if (out.format == "json")
    write_json(t, buf);
  else
    write_csv(t, buf);
  if (out.path.empty()) {
    std::cout << buf.str();
  } else {
    std::ofstream f(out.path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + out.path);
    f << buf.str();
  }
}

struct ModelOptions {
  int n = 3;
  double a = 1.0;
  double K = 0.0;
  double ratio = 0.0;

  ModelConfig config() const {
    const bool has_K = K > 0.0, has_ratio = ratio > 0.0;
    if (has_K == has_ratio)
      throw std::invalid_argument("exactly one of --K or --ratio must be given");
    return has_K ? ModelConfig(n, a, K) : ModelConfig::from_ratio(n, ratio, a);
  }
};

SignSequence parse_sigma(const std::string& text, int n) {
  const SignSequence s = SignSequence::from_string(text);
  if (s.size() != n - 1)
    throw std::invalid_argument("sigma must have length n-1 = " +
                                std::to_string(n - 1) + ", got " +
                                std::to_string(s.size()));
  return s;
}

void add_model_meta(Table& t, const ModelConfig& cfg) {
  t.meta.emplace_back("n", cfg.n);
  t.meta.emplace_back("a", cfg.a);
  t.meta.emplace_back("K", cfg.K);
  t.meta.emplace_back("K_over_a", cfg.K / cfg.a);
}

// rows (sigma, multiplicity, xi, c_hat, verdict, v_1..v_{2n0}); coincident
// phase vectors (the corner quadruple at xi = 1) collapse into one row with a
// multiplicity annotation
Table equilibria_table(const ModelConfig& cfg, const std::optional<SignSequence>& only,
                       double tol) {
  Table t;
  t.meta.emplace_back("command", "equilibria");
  t.meta.emplace_back("units", "angles rad; c_hat dimensionless; K rad/time");
  add_model_meta(t, cfg);
  t.meta.emplace_back("xi_tolerance", tol);
  t.columns = {"sigma", "multiplicity", "xi", "c_hat", "verdict"};
  for (int i = 1; i <= 2 * cfg.n0; ++i) t.columns.push_back("v_" + std::to_string(i));

  std::vector<Equilibrium> found;
  std::vector<int> multiplicity;
  auto add = [&](const Equilibrium& eq) {
    for (std::size_t k = 0; k < found.size(); ++k) {
      double dist = 0.0;
      for (int i = 0; i < 2 * cfg.n0; ++i)
        dist = std::max(dist, std::fabs(wrap_angle(eq.v[i] - found[k].v[i])));
      if (dist < 1e-9) {
        ++multiplicity[k];
        return;
      }
    }
    found.push_back(eq);
    multiplicity.push_back(1);
  };

  if (only) {
    for (double xi : solve_xi(*only, cfg.beta, tol))
      add(build_equilibrium(*only, xi, cfg));
  } else {
    // per-sequence solves run in parallel; the multiplicity merge stays a
    // serial reduction so row order is the enumeration order
    const auto seqs = enumerate_sequences(cfg.n0);
    std::vector<std::vector<Equilibrium>> found_per(seqs.size());
    parallel_for(seqs.size(), [&](std::size_t k) {
      for (double xi : solve_xi(seqs[k], cfg.beta, tol))
        found_per[k].push_back(build_equilibrium(seqs[k], xi, cfg));
    });
    for (const auto& block : found_per)
      for (const auto& eq : block) add(eq);
  }

  for (std::size_t k = 0; k < found.size(); ++k) {
    const Equilibrium& eq = found[k];
    const StabilityReport rep = stability_at(eq, cfg);
    std::vector<json> row{eq.sigma.str(), multiplicity[k], eq.xi, eq.c_hat,
                          verdict_name(rep.verdict)};
    for (double v : eq.v) row.emplace_back(v);
    t.rows.push_back(std::move(row));
  }
  return t;
}

int cmd_equilibria(const ModelOptions& mo, const std::string& sigma_text, double tol,
                   const OutputOptions& out) {
  const ModelConfig cfg = mo.config();
  std::optional<SignSequence> only;
  if (!sigma_text.empty()) only = parse_sigma(sigma_text, cfg.n);
  emit(equilibria_table(cfg, only, tol), out);
  return 0;
}

int cmd_bifurcations(int n, double a, const std::string& sigma_text,
                     bool enumerate_all, const OutputOptions& out) {
  // event geometry is coupling-free; K enters only through K* = a/|chi|
  const ModelConfig cfg(n, a, a);
  Table t;
  t.meta.emplace_back("command", "bifurcations");
  t.meta.emplace_back("units", "K_over_a dimensionless; xi_star dimensionless");
  t.meta.emplace_back("n", cfg.n);
  t.meta.emplace_back("a", cfg.a);
  t.columns = {"kind", "K_over_a", "xi_star", "criticality", "degeneracy_order",
               "participants"};

  auto add_event = [&](const BifurcationEvent& ev) {
    std::string parts;
    for (std::size_t i = 0; i < ev.participants.size(); ++i)
      parts += (i ? ";" : "") + ev.participants[i].str();
    t.rows.push_back({kind_name(ev.kind), ev.K_star / cfg.a, ev.xi_star,
                      criticality_name(ev.criticality), ev.degeneracy_order, parts});
  };

  if (enumerate_all) {
    // exact enumerated counts next to the combinatorial lower bounds
    const EventCounts counts = count_events(cfg.n0);
    t.meta.emplace_back("distinct_families", counts.distinct_families);
    t.meta.emplace_back("coarse_families", counts.coarse_families);
    t.meta.emplace_back("saddle_nodes", counts.saddle_nodes);
    t.meta.emplace_back("saddle_node_lower_bound", counts.saddle_node_bound);
    t.meta.emplace_back("pitchforks", counts.pitchforks);
    t.meta.emplace_back("pitchfork_lower_bound", counts.pitchfork_bound);
    if (counts.pitchfork_prime_bound > 0)
      t.meta.emplace_back("pitchfork_prime_lower_bound", counts.pitchfork_prime_bound);

    const auto seqs = enumerate_sequences(cfg.n0);
    for (const auto& sigma : seqs)
      for (const auto& ev : detect_saddle_nodes(sigma, cfg)) add_event(ev);
    for (const auto& sigma : seqs) {
      if (sigma.sign(1) != 1 || sigma.sign(2 * cfg.n0) != 1) continue;  // one per quadruple
      if (const auto ev = detect_pitchforks(corner_quadruple(sigma), cfg)) add_event(*ev);
    }
  } else {
    const SignSequence sigma = sigma_text.empty()
                                   ? SignSequence::all_plus(cfg.n0)
                                   : parse_sigma(sigma_text, cfg.n);
    for (const auto& ev : detect_saddle_nodes(sigma, cfg)) add_event(ev);
    if (const auto ev = detect_pitchforks(corner_quadruple(sigma), cfg)) add_event(*ev);
  }
  emit(t, out);
  return 0;
}

int cmd_chi(int n, double a, const std::string& sigma_text, int samples,
            const OutputOptions& out) {
  if (samples < 1) throw std::invalid_argument("--samples must be >= 1");
  const SignSequence sigma = parse_sigma(sigma_text, n);
  const ChiCurve curve(sigma);
  Table t;
  t.meta.emplace_back("command", "chi");
  t.meta.emplace_back("units", "xi, chi, dchi_dxi, h dimensionless");
  t.meta.emplace_back("n", n);
  t.meta.emplace_back("a", a);
  t.meta.emplace_back("sigma", sigma.str());
  t.meta.emplace_back("sampling", "xi_k = k/(samples+1), interior points only");
  t.columns = {"xi", "chi", "dchi_dxi", "h"};
  for (int k = 1; k <= samples; ++k) {
    const double xi = static_cast<double>(k) / (samples + 1);
    t.rows.push_back({xi, curve.chi(xi), curve.deriv(xi), curve.h(xi)});
  }
  emit(t, out);
  return 0;
}

int cmd_diagram(int n, double a, double k_min, double k_max, int samples,
                const OutputOptions& out) {
  const auto rows = branch_diagram((n - 1) / 2, k_min, k_max, samples, a);
  Table t;
  t.meta.emplace_back("command", "diagram");
  t.meta.emplace_back("units", "K rad/time; v rad");
  t.meta.emplace_back("n", n);
  t.meta.emplace_back("a", a);
  t.meta.emplace_back("K_min", k_min);
  t.meta.emplace_back("K_max", k_max);
  t.meta.emplace_back("samples", samples);
  t.columns = {"K", "sigma", "xi", "component", "v", "stability"};
  for (const DiagramRow& r : rows)
    t.rows.push_back({r.K, r.sigma, r.xi, r.component, r.v_value,
                      std::string(1, r.flag)});
  emit(t, out);
  return 0;
}

int cmd_stability(const ModelOptions& mo, const std::string& sigma_text, double xi,
                  const OutputOptions& out) {
  const SignSequence sigma = parse_sigma(sigma_text, mo.n);
  std::vector<std::pair<double, ModelConfig>> points;
  if (xi > 0.0) {
    points.emplace_back(xi, config_on_branch(sigma, xi, mo.a));
  } else {
    const ModelConfig cfg = mo.config();
    for (double root : solve_xi(sigma, cfg.beta)) points.emplace_back(root, cfg);
  }
  if (points.empty())
    throw std::runtime_error("no equilibrium for this sigma at the given coupling");

  json data = json::array();
  for (const auto& [x, cfg] : points) {
    const Equilibrium eq = build_equilibrium(sigma, x, cfg);
    const StabilityReport rep = stability_at(eq, cfg);
    data.push_back({{"xi", x},
                    {"K_over_a", cfg.K / cfg.a},
                    {"c_hat", eq.c_hat},
                    {"eigenvalues", rep.eigenvalues},
                    {"l_plus", rep.l_plus},
                    {"l_zero", rep.l_zero},
                    {"l_minus", rep.l_minus},
                    {"zero_tol", rep.zero_tol},
                    {"verdict", verdict_name(rep.verdict)}});
  }
  const json payload{{"meta",
                      {{"command", "stability"},
                       {"n", mo.n},
                       {"a", mo.a},
                       {"sigma", sigma.str()}}},
                     {"data", data}};
  if (out.path.empty()) {
    std::cout << payload.dump(2) << "\n";
  } else {
    std::ofstream f(out.path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + out.path);
    f << payload.dump(2) << "\n";
  }
  return 0;
}

int cmd_simulate(const ModelOptions& mo, const std::string& sigma_text, double perturb,
                 std::uint64_t seed, double t_end, double dt, int stride,
                 const OutputOptions& out) {
  const ModelConfig cfg = mo.config();
  const SignSequence sigma = sigma_text.empty() ? SignSequence::all_plus(cfg.n0)
                                                : parse_sigma(sigma_text, cfg.n);
  const auto roots = solve_xi(sigma, cfg.beta);
  if (roots.empty())
    throw std::runtime_error("no equilibrium for this sigma at the given coupling");
  const Equilibrium eq = build_equilibrium(sigma, roots.front(), cfg);
  FullState u0 = lift(ReducedState{eq.v}, 0.0, cfg);

  if (perturb > 0.0) {
    Rng01 rng(seed);
    std::vector<double> p(cfg.n);
    double sq = 0.0;
    for (double& x : p) {
      x = rng.next_symmetric();
      sq += x * x;
    }
    const double scale = perturb / std::sqrt(sq / cfg.n);
    for (int i = 0; i < cfg.n; ++i) u0.u[i] += p[i] * scale;
  }

  if (t_end <= 0.0) t_end = 50.0 / cfg.K;
  if (dt <= 0.0) dt = 0.01 / cfg.K;
  const Trajectory traj = integrate(u0, cfg, t_end, dt, stride);

  Table t;
  t.meta.emplace_back("command", "simulate");
  t.meta.emplace_back("units", "t time; u_i rad");
  add_model_meta(t, cfg);
  t.meta.emplace_back("sigma", sigma.str());
  t.meta.emplace_back("xi", eq.xi);
  t.meta.emplace_back("perturb", perturb);
  t.meta.emplace_back("seed", seed);
  t.meta.emplace_back("dt", dt);
  t.columns = {"t"};
  for (int i = 1; i <= cfg.n; ++i) t.columns.push_back("u_" + std::to_string(i));
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::vector<json> row{traj.times[k]};
    for (double u : traj.states[k]) row.emplace_back(u);
    t.rows.push_back(std::move(row));
  }
  emit(t, out);
  return 0;
}

std::vector<Interval> parse_flips(const std::string& text) {
  std::vector<Interval> flips;
  if (text.empty()) return flips;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("flip intervals must look like lo:hi, got " + item);
    flips.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
  }
  return flips;
}

int cmd_continuum(double ratio, const std::string& flip_text, int samples,
                  int discretize_n, const OutputOptions& out) {
  if (!(ratio > 0.0)) throw std::invalid_argument("--ratio must be > 0");
  const double beta = 1.0 / ratio;
  const auto sol = build_discontinuous(parse_flips(flip_text), beta);
  if (!sol)
    throw std::runtime_error("no stationary profile for this coupling and flip set");

  Table t;
  t.meta.emplace_back("command", "continuum");
  t.meta.emplace_back("units", "x dimensionless; u rad; C dimensionless");
  t.meta.emplace_back("K_over_a", ratio);
  t.meta.emplace_back("kind", continuum_kind_name(sol->kind));
  t.meta.emplace_back("C", sol->C);
  if (!sol->note.empty()) t.meta.emplace_back("note", sol->note);

  if (discretize_n > 0) {
    const StepFunctionState st = discretize(*sol, discretize_n);
    t.columns = {"i", "x_mid", "value"};
    for (int i = 1; i <= discretize_n; ++i)
      t.rows.push_back({i, (i - 0.5) / discretize_n, st.values[i - 1]});
  } else {
    t.columns = {"x", "u"};
    for (int k = 0; k <= samples; ++k) {
      const double x = static_cast<double>(k) / samples;
      t.rows.push_back({x, sol->profile(x)});
    }
  }
  emit(t, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synchronized-state analysis of the evenly spaced Kuramoto model"};
  app.require_subcommand(1);

  ModelOptions mo;
  OutputOptions out;
  std::string sigma_text;
  double tol = 1e-12;

  auto add_common = [&](CLI::App* sub, bool needs_coupling) {
    sub->add_option("--n", mo.n, "node count (odd, >= 3)")->required();
    sub->add_option("--a", mo.a, "frequency slope (default 1)");
    if (needs_coupling) {
      sub->add_option("--K", mo.K, "coupling strength");
      sub->add_option("--ratio", mo.ratio, "coupling ratio K/a");
    }
    sub->add_option("--format", out.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output", out.path, "output file (default stdout)");
  };

  auto* eq = app.add_subcommand("equilibria", "locked states at one coupling");
  add_common(eq, true);
  eq->add_option("--sigma", sigma_text, "restrict to one sign sequence (+/- string)");
  eq->add_option("--tol", tol, "xi solver tolerance");

  bool enumerate_all = false;
  auto* bif = app.add_subcommand("bifurcations", "fold and branch-point events");
  add_common(bif, false);
  bif->add_flag("--enumerate-all", enumerate_all, "scan every sign sequence");
  bif->add_option("--sigma", sigma_text, "one sign sequence (+/- string)");

  int samples = 1000;
  auto* chi = app.add_subcommand("chi", "branch function samples for one sequence");
  add_common(chi, false);
  chi->add_option("--sigma", sigma_text, "sign sequence (+/- string)")->required();
  chi->add_option("--samples", samples, "number of interior sample points");

  double k_min = 0.5, k_max = 2.5;
  int dsamples = 101;
  auto* dia = app.add_subcommand("diagram", "branch diagram across a K sweep");
  add_common(dia, false);
  dia->add_option("--k-min", k_min, "lower end of the K sweep")->required();
  dia->add_option("--k-max", k_max, "upper end of the K sweep")->required();
  dia->add_option("--samples", dsamples, "K samples");

  double xi_opt = 0.0;
  auto* stab = app.add_subcommand("stability", "spectrum at an equilibrium (JSON)");
  add_common(stab, true);
  stab->add_option("--sigma", sigma_text, "sign sequence (+/- string)")->required();
  stab->add_option("--xi", xi_opt, "evaluate on the branch at this xi instead of K");

  double perturb = 0.0, t_end = 0.0, dt = 0.0;
  std::uint64_t seed = 1;
  int stride = 10;
  auto* sim = app.add_subcommand("simulate", "integrate the flow from a locked state");
  add_common(sim, true);
  sim->add_option("--sigma", sigma_text, "sign sequence (default all '+')");
  sim->add_option("--perturb", perturb, "square-integrable perturbation size");
  sim->add_option("--seed", seed, "perturbation seed");
  sim->add_option("--t-end", t_end, "integration time (default 50/K)");
  sim->add_option("--dt", dt, "time step (default 0.01/K)");
  sim->add_option("--stride", stride, "record every k-th step");

  double ratio_c = 0.0;
  std::string flip_text;
  int csamples = 200, discretize_n = 0;
  auto* cont = app.add_subcommand("continuum", "mean-field stationary profiles");
  cont->add_option("--ratio", ratio_c, "coupling ratio K/a")->required();
  cont->add_option("--flip", flip_text, "flip intervals lo:hi[,lo:hi...]");
  cont->add_option("--samples", csamples, "profile sample count");
  cont->add_option("--discretize", discretize_n, "emit cell averages for odd n");
  cont->add_option("--format", out.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cont->add_option("--output", out.path, "output file (default stdout)");

  auto* self = app.add_subcommand("selfcheck", "run the verification suite");
  (void)self;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (eq->parsed()) return cmd_equilibria(mo, sigma_text, tol, out);
    if (bif->parsed()) return cmd_bifurcations(mo.n, mo.a, sigma_text, enumerate_all, out);
    if (chi->parsed()) return cmd_chi(mo.n, mo.a, sigma_text, samples, out);
    if (dia->parsed()) return cmd_diagram(mo.n, mo.a, k_min, k_max, dsamples, out);
    if (stab->parsed()) return cmd_stability(mo, sigma_text, xi_opt, out);
    if (sim->parsed())
      return cmd_simulate(mo, sigma_text, perturb, seed, t_end, dt, stride, out);
    if (cont->parsed())
      return cmd_continuum(ratio_c, flip_text, csamples, discretize_n, out);
    if (self->parsed()) {
      const auto results = run_selfcheck();
      return report_selfcheck(results, std::cout) == 0 ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
