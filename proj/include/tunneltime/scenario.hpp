#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tunneltime/derivative.hpp"
#include "tunneltime/em_pulse.hpp"
#include "tunneltime/error.hpp"
#include "tunneltime/first_passage.hpp"
#include "tunneltime/potentials.hpp"
#include "tunneltime/timescales.hpp"

namespace tunneltime {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Configuration error pointing at the offending field (dotted JSON path).
class ScenarioError : public Error {
 public:
  ScenarioError(std::string field, const std::string& what)
      : Error(ErrorCode::config, what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class ScenarioKind { timescale_sweep, first_passage, em_pulse };

struct Sweep {
  std::string parameter;
  std::vector<double> grid;
};

struct OutputSpec {
  std::string path;
  std::string format = "csv";  // csv or json
  bool json_mirror = false;    // with csv: also write <path>.json
};

struct TimescaleScenario {
  PotentialProfile profile;
  Channel channel = Channel::transmission;
  DerivativeSpec derivative;
  double energy = 0.0;          // fixed energy when sweeping a length
  bool closed_form_sojourn = false;
};

struct FirstPassageScenario {
  LatticeSpec lattice;
  std::string mode = "evolve";  // evolve, zeno_scan, nonhermitian
  double gamma = 1.0;
  double t_fixed = 5.0;
};

struct EmPulseScenario {
  PulseSpec pulse;
  MediumSpec medium;
  std::string mode = "decomposition";  // decomposition or traces
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::timescale_sweep;
  std::optional<Sweep> sweep;
  OutputSpec output;
  TimescaleScenario timescale;
  FirstPassageScenario first_passage;
  EmPulseScenario em;
  std::string digest;  // FNV-1a of the canonical JSON text
};

/// Throws ScenarioError on unknown keys, missing fields, wrong types or a
/// spec that fails its module's validation.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

std::string fnv1a_digest(const std::string& text);

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> reasons;  // one per row, empty when every cell is present
  std::vector<std::pair<std::string, std::string>> metadata;
};

/// Runs every sweep point on up to `workers` threads; rows come back in sweep
/// order. Per-point failures become NaN cells with a reason.
ResultTable run_scenario(const Scenario& scenario, unsigned workers = 1);

/// 17 significant digits; metadata as leading `# key: value` lines.
std::string to_csv(const ResultTable& table);
std::string to_json(const ResultTable& table);
ResultTable parse_csv(const std::string& text);

struct Tolerances {
  double fallback = 1e-6;
  std::map<std::string, double> per_column;
  double for_column(const std::string& name) const;
};

/// "default=1e-6,sojourn=1e-4"; a bare number sets the default.
Tolerances parse_tolerances(const std::string& spec);

struct CellMismatch {
  std::size_t row = 0;
  std::string column;
  double value = 0.0;
  double reference = 0.0;
  double relative_difference = 0.0;
};

struct CompareReport {
  bool pass = true;
  std::size_t cells = 0;
  std::vector<CellMismatch> mismatches;
  std::vector<std::size_t> reason_mismatches;
};

/// Cell-by-cell relative difference |a - b| / max(|a|, |b|) (absolute when
/// both are zero). NaN matches NaN only. Throws Error{validation} when the
/// columns or row counts differ.
CompareReport compare(const ResultTable& table, const ResultTable& reference, const Tolerances& tol);

}  // namespace tunneltime
