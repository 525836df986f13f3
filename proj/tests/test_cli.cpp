// End-to-end checks of the command-line tool: determinism, exit codes and
// CSV round-tripping. Expects the binary path as argv[1].

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  if (!ok) {
    ++failures;
    std::cerr << "[FAIL] " << what << "\n";
  } else {
    std::cout << "[ok] " << what << "\n";
  }
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& cmd) {
  RunResult r;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct Csv {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream ss(text);
  std::string line;
  bool header_done = false;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!header_done) {
      csv.columns = cells;
      header_done = true;
    } else {
      csv.rows.push_back(cells);
    }
  }
  return csv;
}

int column_of(const Csv& csv, const std::string& name) {
  for (std::size_t c = 0; c < csv.columns.size(); ++c)
    if (csv.columns[c] == name) return static_cast<int>(c);
  return -1;
}

std::string g15(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: test_cli <kmsync binary>\n";
    return 2;
  }
  const std::string bin = argv[1];

  // determinism: identical invocations produce byte-identical output
  {
    const std::string cmd = bin + " equilibria --n 3 --ratio 1.0";
    const RunResult a = run(cmd);
    const RunResult b = run(cmd);
    check(a.exit_code == 0, "equilibria exits 0");
    check(!a.out.empty() && a.out == b.out, "identical invocations are byte-identical");

    // the branch-point state is present once with multiplicity 4
    const Csv csv = parse_csv(a.out);
    const int xi_col = column_of(csv, "xi");
    const int mult_col = column_of(csv, "multiplicity");
    bool found = false;
    for (const auto& row : csv.rows)
      if (std::fabs(std::stod(row[xi_col]) - 1.0) < 1e-12 && row[mult_col] == "4")
        found = true;
    check(found, "xi = 1 state reported once with multiplicity 4");
  }

  // CSV values round-trip at the printed precision
  {
    const RunResult r = run(bin + " chi --n 11 --sigma \"+++++-++++\" --samples 100");
    check(r.exit_code == 0, "chi exits 0");
    const Csv csv = parse_csv(r.out);
    check(csv.rows.size() == 100, "chi emits the requested number of rows");
    bool stable = true;
    for (const auto& row : csv.rows)
      for (const auto& cell : row) {
        const double v = std::stod(cell);
        if (g15(std::stod(g15(v))) != g15(v)) stable = false;
      }
    check(stable, "CSV cells reparse to the same 15-digit form");
  }

  // empty result below the locking threshold
  {
    const RunResult r = run(bin + " equilibria --n 5 --ratio 0.5");
    check(r.exit_code == 0, "below-threshold equilibria exits 0");
    check(parse_csv(r.out).rows.empty(), "below-threshold table is empty");
  }

  // one stable and one unstable state on the locked branch
  {
    const RunResult r = run(bin + " equilibria --n 5 --ratio 0.7 --sigma \"++++\"");
    const Csv csv = parse_csv(r.out);
    check(csv.rows.size() == 2, "two locked states at K/a = 0.7");
    const int verdict = column_of(csv, "verdict");
    int stable = 0, unstable = 0;
    for (const auto& row : csv.rows) {
      if (row[verdict] == "stable") ++stable;
      if (row[verdict] == "unstable") ++unstable;
    }
    check(stable == 1 && unstable == 1, "one stable and one unstable row");
  }

  // events for n = 3
  {
    const RunResult r = run(bin + " bifurcations --n 3 --enumerate-all");
    const Csv csv = parse_csv(r.out);
    const int kind = column_of(csv, "kind");
    const int K = column_of(csv, "K_over_a");
    bool fold = false, branch = false;
    for (const auto& row : csv.rows) {
      const double k = std::stod(row[K]);
      if (row[kind] == "saddle-node" && std::fabs(k - 0.56812) < 1e-4) fold = true;
      if (row[kind] == "pitchfork" && std::fabs(k - 1.0) < 1e-10) branch = true;
    }
    check(fold && branch, "n=3 events include the fold and the branch point");
    check(r.out.find("# distinct_families=4") != std::string::npos &&
              r.out.find("# coarse_families=3") != std::string::npos,
          "enumeration reports distinct and coarse family counts");
  }

  // JSON envelope
  {
    const RunResult r = run(bin + " equilibria --n 3 --ratio 2.0 --format json");
    check(r.exit_code == 0, "json output exits 0");
    const auto doc = nlohmann::json::parse(r.out, nullptr, false);
    check(!doc.is_discarded() && doc.contains("meta") && doc.contains("data"),
          "json output carries the meta/data envelope");
  }

  // stability subcommand emits a spectrum
  {
    const RunResult r = run(bin + " stability --n 5 --ratio 0.7 --sigma \"++++\"");
    const auto doc = nlohmann::json::parse(r.out, nullptr, false);
    check(!doc.is_discarded() && doc["data"].size() == 2 &&
              doc["data"][0]["eigenvalues"].size() == 5,
          "stability reports one spectrum per root");
  }

  // exit codes
  {
    check(run(bin + " equilibria --n 5 --ratio 1.0 --sigma \"++x+\"").exit_code == 2,
          "bad sigma character exits 2");
    check(run(bin + " equilibria --n 5 --ratio 1.0 --sigma \"+++\"").exit_code == 2,
          "wrong sigma length exits 2");
    check(run(bin + " equilibria --n 5").exit_code == 2, "missing coupling exits 2");
    check(run(bin + " simulate --n 5 --ratio 0.5").exit_code == 3,
          "simulating a nonexistent state exits 3");
    check(run(bin + " continuum --ratio 0.5").exit_code == 3,
          "continuum below threshold exits 3");
  }

  // continuum profile export
  {
    const RunResult r = run(bin + " continuum --ratio 1.0 --samples 50");
    const Csv csv = parse_csv(r.out);
    check(r.exit_code == 0 && csv.rows.size() == 51, "continuum profile sampled");
    const RunResult d = run(bin + " continuum --ratio 1.0 --discretize 11");
    check(d.exit_code == 0 && parse_csv(d.out).rows.size() == 11,
          "continuum cell averages emitted");
  }

  if (failures == 0) {
    std::cout << "all cli checks passed\n";
    return 0;
  }
  std::cerr << failures << " cli check(s) failed\n";
  return 1;
}
