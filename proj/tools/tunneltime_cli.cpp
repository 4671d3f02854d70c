#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tunneltime/scenario.hpp"

namespace {

using namespace tunneltime;

int report_error(const std::string& code, const std::string& field, const std::string& message) {
  nlohmann::json j;
  j["error"] = code;
  if (!field.empty()) j["field"] = field;
  j["message"] = message;
  std::cerr << j.dump() << '\n';
  return 2;
}

unsigned cap_workers(unsigned requested) {
  if (const char* env = std::getenv("TUNNELTIME_WORKERS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0 && (requested == 0 || requested > static_cast<unsigned>(cap))) return static_cast<unsigned>(cap);
  }
  return requested;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("<file>", "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError("output.path", "cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tunneling-time laboratory: scattering timescales, lattice first passage, pulse delays"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string scenario_path;
  std::string output_override;
  unsigned workers = 0;
  auto* run = app.add_subcommand("run", "Run a scenario and write its result table");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("-o,--output", output_override, "Output path (overrides output.path; '-' for stdout)");
  run->add_option("-j,--workers", workers, "Worker threads (0: all cores; capped by TUNNELTIME_WORKERS)");

  auto* check = app.add_subcommand("validate", "Check a scenario without running it");
  check->add_option("scenario", scenario_path, "Scenario JSON file")->required();

  std::string table_a, table_b, tol_spec = "default=1e-6";
  auto* cmp = app.add_subcommand("compare", "Compare a result table against a reference");
  cmp->add_option("table", table_a, "CSV table")->required();
  cmp->add_option("reference", table_b, "Reference CSV table")->required();
  cmp->add_option("--tol", tol_spec, "Relative tolerances, e.g. default=1e-6,sojourn=1e-4");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (check->parsed()) {
      const Scenario s = load_scenario(scenario_path);
      std::cout << "ok " << s.digest << '\n';
      return 0;
    }
    if (run->parsed()) {
      const Scenario s = load_scenario(scenario_path);
      const ResultTable table = run_scenario(s, cap_workers(workers));
      const std::string path = output_override.empty() ? s.output.path : output_override;
      const std::string text = s.output.format == "json" ? to_json(table) : to_csv(table);
      if (path.empty() || path == "-") {
        std::cout << text;
      } else {
        write_file(path, text);
        if (s.output.format == "csv" && s.output.json_mirror) write_file(path + ".json", to_json(table));
      }
      return 0;
    }
    const Tolerances tol = parse_tolerances(tol_spec);
    const CompareReport rep = compare(parse_csv(read_file(table_a)), parse_csv(read_file(table_b)), tol);
    for (const CellMismatch& m : rep.mismatches)
      std::cout << "FAIL row " << m.row << " column " << m.column << ": " << m.value << " vs " << m.reference
                << " (relative " << m.relative_difference << ", tol " << tol.for_column(m.column) << ")\n";
    for (std::size_t r : rep.reason_mismatches) std::cout << "FAIL row " << r << ": reason presence differs\n";
    std::cout << (rep.pass ? "PASS" : "FAIL") << ' ' << rep.cells << " cells, " << rep.mismatches.size()
              << " mismatches\n";
    return rep.pass ? 0 : 1;
  } catch (const ScenarioError& e) {
    return report_error("config", e.field(), e.what());
  } catch (const Error& e) {
    return report_error(std::string(to_string(e.code())), "", e.what());
  } catch (const std::exception& e) {
    return report_error("internal", "", e.what());
  }
}
