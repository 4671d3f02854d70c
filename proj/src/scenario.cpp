#include "tunneltime/scenario.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "tunneltime/parallel.hpp"
#include "tunneltime/scatter.hpp"

namespace tunneltime {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

// Typed access to one JSON object that remembers which keys were consumed so
// leftovers can be reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ScenarioError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ScenarioError(at(key), "missing required field");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ScenarioError(at(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ScenarioError(at(key), "must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : mark(key, fallback); }

  int integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ScenarioError(at(key), "expected an integer");
    return v.get<int>();
  }
  int integer(const std::string& key, int fallback) { return has(key) ? integer(key) : mark(key, fallback); }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ScenarioError(at(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : mark(key, fallback);
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return mark(key, fallback);
    const json& v = raw(key);
    if (!v.is_boolean()) throw ScenarioError(at(key), "expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw ScenarioError(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ScenarioError(at(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::string choice(const std::string& key, const std::vector<std::string>& allowed, const std::string& fallback) {
    const std::string s = string(key, fallback);
    for (const auto& a : allowed)
      if (a == s) return s;
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw ScenarioError(at(key), "'" + s + "' is not one of: " + list);
  }

  std::string at(const std::string& key) const { return join_path(path_, key); }
  const std::string& path() const { return path_; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ScenarioError(at(it.key()), "unknown key");
  }

 private:
  template <class T>
  T mark(const std::string& key, T value) {
    seen_.insert(key);
    return value;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void forward_problems(const std::vector<std::string>& problems, const std::string& field) {
  if (problems.empty()) return;
  std::string msg;
  for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
  throw ScenarioError(field, msg);
}

PotentialProfile parse_profile(Reader& parent, const std::string& key) {
  Reader r(parent.raw(key), parent.at(key));
  PotentialProfile p;
  if (r.has("barrier")) {
    Reader b(r.raw("barrier"), r.at("barrier"));
    const double v0 = b.number("v0");
    const double width = b.number("width");
    b.finish();
    if (!(width > 0.0)) throw ScenarioError(b.at("width"), "must be > 0");
    p = make_rectangular_barrier(v0, width);
    if (r.has("segments")) throw ScenarioError(r.at("segments"), "give either barrier or segments, not both");
  } else {
    const json& segs = r.raw("segments");
    if (!segs.is_array() || segs.empty()) throw ScenarioError(r.at("segments"), "expected a non-empty array");
    for (std::size_t i = 0; i < segs.size(); ++i) {
      Reader s(segs[i], r.at("segments") + "[" + std::to_string(i) + "]");
      Segment seg;
      seg.length = s.number("length");
      seg.v_real = s.number("v_real", 0.0);
      seg.v_imag = s.number("v_imag", 0.0);
      seg.omega_larmor = s.number("omega_larmor", 0.0);
      s.finish();
      p.segments.push_back(seg);
    }
    const std::vector<double> region = r.numbers("clock_region");
    if (region.size() != 2 || region[0] < 0 || region[1] < region[0] || region[0] != std::floor(region[0]) ||
        region[1] != std::floor(region[1]))
      throw ScenarioError(r.at("clock_region"), "expected [begin, end) segment indices");
    p.clock_region = {static_cast<std::size_t>(region[0]), static_cast<std::size_t>(region[1])};
  }
  for (const char* side : {"left", "right"}) {
    if (!r.has(side)) continue;
    Reader l(r.raw(side), r.at(side));
    Lead lead;
    lead.v_real = l.number("v_real", 0.0);
    lead.v_imag = l.number("v_imag", 0.0);
    lead.omega_larmor = l.number("omega_larmor", 0.0);
    l.finish();
    (std::string(side) == "left" ? p.left : p.right) = lead;
  }
  r.finish();
  forward_problems(validate(p), parent.at(key));
  return p;
}

DerivativeSpec parse_derivative(Reader& parent) {
  DerivativeSpec d;
  if (!parent.has("derivative")) return d;
  Reader r(parent.raw("derivative"), parent.at("derivative"));
  if (r.has("steps")) d.steps = r.numbers("steps");
  d.order = r.integer("order", d.order);
  d.richardson_levels = r.integer("richardson_levels", d.richardson_levels);
  r.finish();
  forward_problems(validate(d), parent.at("derivative"));
  return d;
}

LatticeSpec parse_lattice(Reader& parent) {
  Reader r(parent.raw("lattice"), parent.at("lattice"));
  LatticeSpec s;
  s.n_sites = r.integer("n_sites");
  s.hopping = r.number("hopping", 1.0);
  s.initial_site = r.integer("initial_site");
  const std::vector<double> det = r.numbers("detector_sites");
  for (double d : det) {
    if (d != std::floor(d)) throw ScenarioError(r.at("detector_sites"), "expected integer site indices");
    s.detector_sites.push_back(static_cast<int>(d));
  }
  s.tau = r.number("tau", 1.0);
  s.n_steps = r.integer("n_steps", 1);
  r.finish();
  forward_problems(validate(s), parent.at("lattice"));
  return s;
}

PulseSpec parse_pulse(Reader& parent) {
  Reader r(parent.raw("pulse"), parent.at("pulse"));
  PulseSpec p;
  p.carrier = r.number("carrier");
  p.duration = r.number("duration");
  p.n_samples = r.integer("n_samples", p.n_samples);
  p.time_span = r.number("time_span", p.time_span);
  p.center = r.number("center", 0.25 * p.time_span);
  r.finish();
  forward_problems(validate(p), parent.at("pulse"));
  return p;
}

MediumSpec parse_medium(Reader& parent) {
  Reader r(parent.raw("medium"), parent.at("medium"));
  MediumSpec m;
  const std::string model = r.choice("model", {"vacuum", "lorentz", "plasma"}, "vacuum");
  m.model = model == "lorentz" ? MediumModel::lorentz : model == "plasma" ? MediumModel::plasma : MediumModel::vacuum;
  m.resonance = r.number("resonance", 0.0);
  m.strength = r.number("strength", 0.0);
  m.damping = r.number("damping", 0.0);
  m.thickness = r.number("thickness");
  r.finish();
  forward_problems(validate(m), parent.at("medium"));
  return m;
}

Sweep parse_sweep(Reader& parent, const std::vector<std::string>& parameters) {
  Reader r(parent.raw("sweep"), parent.at("sweep"));
  Sweep s;
  s.parameter = r.choice("parameter", parameters, parameters.front());
  if (r.has("grid") && r.has("linspace")) throw ScenarioError(r.at("grid"), "give either grid or linspace");
  if (r.has("linspace")) {
    Reader l(r.raw("linspace"), r.at("linspace"));
    const double start = l.number("start");
    const double stop = l.number("stop");
    const int count = l.integer("count");
    l.finish();
    if (count < 1) throw ScenarioError(l.at("count"), "must be >= 1");
    for (int i = 0; i < count; ++i)
      s.grid.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
  } else {
    s.grid = r.numbers("grid");
  }
  r.finish();
  if (s.grid.empty()) throw ScenarioError(r.at("grid"), "sweep grid is empty");
  for (double v : s.grid)
    if (!std::isfinite(v)) throw ScenarioError(r.at("grid"), "sweep grid values must be finite");
  bool up = true, down = true;
  for (std::size_t i = 1; i < s.grid.size(); ++i) {
    up = up && s.grid[i] > s.grid[i - 1];
    down = down && s.grid[i] < s.grid[i - 1];
  }
  if (!up && !down) throw ScenarioError(r.at("grid"), "sweep grid must be strictly monotone");
  return s;
}

OutputSpec parse_output(Reader& parent) {
  OutputSpec o;
  if (!parent.has("output")) return o;
  Reader r(parent.raw("output"), parent.at("output"));
  o.path = r.string("path", "");
  o.format = r.choice("format", {"csv", "json"}, "csv");
  o.json_mirror = r.boolean("json_mirror", false);
  r.finish();
  return o;
}

// -- runners -----------------------------------------------------------------

std::string reason_of(const Error& e) { return std::string(to_string(e.code())) + ": " + e.what(); }

void add_common_metadata(ResultTable& t, const Scenario& s, const char* kind, const char* units) {
  t.metadata.emplace_back("tool", std::string("tunneltime-cli ") + kToolVersion);
  t.metadata.emplace_back("kind", kind);
  t.metadata.emplace_back("scenario_digest", s.digest);
  t.metadata.emplace_back("units", units);
}

ResultTable run_timescale(const Scenario& s, unsigned workers) {
  const TimescaleScenario& ts = s.timescale;
  const Sweep& sweep = *s.sweep;
  ResultTable t;
  add_common_metadata(t, s, "timescale_sweep", "hbar = 1, 2m = 1; energies in units of the potential scale, times in hbar/energy");
  t.metadata.emplace_back("channel", std::string(to_string(ts.channel)));
  t.metadata.emplace_back("sojourn_path", ts.closed_form_sojourn ? "closed_form" : "derivative");
  if (sweep.parameter != "energy") t.columns.push_back(sweep.parameter);
  t.columns.push_back("energy");
  t.columns.push_back("transmission_probability");
  t.columns.push_back("reflection_probability");
  for (Method m : all_methods()) t.columns.emplace_back(to_string(m));
  for (Method m : all_methods()) t.columns.push_back(std::string(to_string(m)) + "_error");
  t.columns.push_back("larmor_y_sign");
  t.columns.push_back("evanescent_regime");
  t.columns.push_back("extrapolated");

  t.rows.assign(sweep.grid.size(), {});
  t.reasons.assign(sweep.grid.size(), "");
  parallel_for(sweep.grid.size(), workers, [&](std::size_t i) {
    const double x = sweep.grid[i];
    PotentialProfile profile = ts.profile;
    double energy = x;
    if (sweep.parameter == "clock_length") {
      energy = ts.energy;
      profile.segments[profile.clock_region.begin].length = x;
    }
    std::vector<double>& row = t.rows[i];
    std::string reasons;
    if (sweep.parameter != "energy") row.push_back(x);
    row.push_back(energy);
    try {
      const ScatteringSolution sol = solve(profile, energy);
      row.push_back(sol.transmission());
      row.push_back(sol.reflection());
    } catch (const Error& e) {
      row.push_back(kNaN);
      row.push_back(kNaN);
      reasons = "scattering: " + reason_of(e);
    }
    try {
      TimescaleReport rep = full_report(profile, energy, ts.derivative, ts.channel);
      if (ts.closed_form_sojourn && ts.channel != Channel::unconditional) {
        TimeEntry e;
        try {
          const ClosedFormSojourn cf = sojourn_closed_form(profile, energy);
          e.value = ts.channel == Channel::transmission ? cf.transmission : cf.reflection;
        } catch (const Error& err) {
          e.reason = reason_of(err);
        }
        rep.entries[Method::sojourn] = e;
      }
      for (Method m : all_methods()) {
        const TimeEntry& e = rep.entries.at(m);
        row.push_back(e.value ? *e.value : kNaN);
        if (!e.value) reasons += (reasons.empty() ? "" : "; ") + std::string(to_string(m)) + ": " + e.reason;
      }
      for (Method m : all_methods()) {
        const TimeEntry& e = rep.entries.at(m);
        row.push_back(e.value ? e.error_estimate : kNaN);
      }
      const TimeEntry& ly = rep.entries.at(Method::larmor_y);
      row.push_back(ly.value ? ly.sign : kNaN);
      row.push_back(rep.evanescent_regime ? 1.0 : 0.0);
      row.push_back(rep.extrapolated ? 1.0 : 0.0);
    } catch (const Error& e) {
      row.resize(t.columns.size(), kNaN);
      reasons += (reasons.empty() ? "" : "; ") + reason_of(e);
    }
    t.reasons[i] = reasons;
  });
  return t;
}

ResultTable run_first_passage(const Scenario& s, unsigned workers) {
  const FirstPassageScenario& fp = s.first_passage;
  ResultTable t;
  add_common_metadata(t, s, "first_passage", "hbar = 1; times in 1/hopping");
  t.metadata.emplace_back("mode", fp.mode);
  if (fp.mode == "zeno_scan") {
    t.columns = {"tau", "n_measurements", "survival"};
    t.metadata.emplace_back("t_fixed", std::to_string(fp.t_fixed));
    const std::vector<double>& taus = s.sweep->grid;
    t.rows.assign(taus.size(), {});
    t.reasons.assign(taus.size(), "");
    parallel_for(taus.size(), workers, [&](std::size_t i) {
      try {
        const ZenoPoint p = zeno_scan(fp.lattice, {taus[i]}, fp.t_fixed, 1).front();
        t.rows[i] = {p.tau, static_cast<double>(p.n_measurements), p.survival};
      } catch (const Error& e) {
        t.rows[i] = {taus[i], kNaN, kNaN};
        t.reasons[i] = reason_of(e);
      }
    });
    return t;
  }
  const DetectionRecord rec = evolve_project(fp.lattice);
  std::vector<double> nonherm;
  if (fp.mode == "nonhermitian") {
    t.columns = {"n", "time", "survival_projective", "survival_nonhermitian"};
    t.metadata.emplace_back("gamma", std::to_string(fp.gamma));
    nonherm = evolve_nonhermitian(fp.lattice, fp.gamma);
  } else {
    t.columns = {"n", "time", "p", "S", "bookkeeping"};
  }
  for (std::size_t n = 0; n < rec.survival.size(); ++n) {
    const double idx = static_cast<double>(n + 1);
    const double time = idx * fp.lattice.tau;
    if (fp.mode == "nonhermitian")
      t.rows.push_back({idx, time, rec.survival[n], nonherm[n]});
    else
      t.rows.push_back({idx, time, rec.detection[n], rec.survival[n], rec.bookkeeping[n]});
    t.reasons.emplace_back();
  }
  return t;
}

ResultTable run_em(const Scenario& s, unsigned workers) {
  const EmPulseScenario& em = s.em;
  ResultTable t;
  add_common_metadata(t, s, "em_pulse", "c = 1; times and lengths in carrier units");
  t.metadata.emplace_back("mode", em.mode);
  if (em.mode == "traces") {
    t.columns = {"time", "e_entry", "h_entry", "e_exit", "h_exit"};
    const PropagationResult r = propagate(em.pulse, em.medium);
    for (std::size_t j = 0; j < r.time.size(); ++j) {
      t.rows.push_back({r.time[j], r.entry.e[j], r.entry.h[j], r.exit.e[j], r.exit.h[j]});
      t.reasons.emplace_back();
    }
    return t;
  }
  const Sweep& sweep = *s.sweep;
  t.columns = {sweep.parameter, "t_in", "t_out", "delta_t", "delta_t_group", "delta_t_reshape", "residual",
               "relative_residual", "residual_flagged", "evanescent_fraction", "evanescent_regime", "luminal",
               "transmitted_energy"};
  t.rows.assign(sweep.grid.size(), {});
  t.reasons.assign(sweep.grid.size(), "");
  parallel_for(sweep.grid.size(), workers, [&](std::size_t i) {
    PulseSpec pulse = em.pulse;
    MediumSpec medium = em.medium;
    const double x = sweep.grid[i];
    if (sweep.parameter == "carrier") pulse.carrier = x;
    else if (sweep.parameter == "duration") pulse.duration = x;
    else if (sweep.parameter == "thickness") medium.thickness = x;
    else if (sweep.parameter == "strength") medium.strength = x;
    else if (sweep.parameter == "damping") medium.damping = x;
    else if (sweep.parameter == "resonance") medium.resonance = x;
    try {
      const DelayReport r = delay_decomposition(pulse, medium);
      t.rows[i] = {x, r.t_in, r.t_out, r.delta_t, r.delta_t_group, r.delta_t_reshape, r.residual,
                   r.relative_residual, r.residual_flagged ? 1.0 : 0.0, r.evanescent_fraction,
                   r.evanescent_regime ? 1.0 : 0.0, r.luminal ? 1.0 : 0.0, r.transmitted_energy};
      if (r.residual_flagged) t.reasons[i] = "decomposition residual above 1e-6";
    } catch (const Error& e) {
      t.rows[i].assign(t.columns.size(), kNaN);
      t.rows[i][0] = x;
      t.reasons[i] = reason_of(e);
    }
  });
  return t;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_cell(const std::string& s, std::size_t line) {
  if (s == "nan" || s.empty()) return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::validation, "line " + std::to_string(line) + ": '" + s + "' is not a number");
  }
}

}  // namespace

std::string fnv1a_digest(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

Scenario parse_scenario(const json& doc) {
  Reader root(doc, "");
  Scenario s;
  const int version = root.integer("schema_version");
  if (version != kSchemaVersion)
    throw ScenarioError("schema_version", "unsupported schema version " + std::to_string(version) + " (expected " +
                                              std::to_string(kSchemaVersion) + ")");
  const std::string kind = root.choice("kind", {"timescale_sweep", "first_passage", "em_pulse"}, "");
  s.output = parse_output(root);

  if (kind == "timescale_sweep") {
    s.kind = ScenarioKind::timescale_sweep;
    TimescaleScenario& ts = s.timescale;
    ts.profile = parse_profile(root, "profile");
    const std::string ch = root.choice("channel", {"transmission", "reflection", "unconditional"}, "transmission");
    ts.channel = ch == "reflection" ? Channel::reflection
                 : ch == "unconditional" ? Channel::unconditional : Channel::transmission;
    ts.derivative = parse_derivative(root);
    ts.closed_form_sojourn = root.choice("sojourn_path", {"derivative", "closed_form"}, "derivative") == "closed_form";
    s.sweep = parse_sweep(root, {"energy", "clock_length"});
    if (s.sweep->parameter == "clock_length") {
      ts.energy = root.number("energy");
      if (ts.profile.clock_region.size() != 1)
        throw ScenarioError("sweep.parameter", "clock_length sweeps need a single-segment clock region");
      for (double v : s.sweep->grid)
        if (!(v > 0.0)) throw ScenarioError("sweep.grid", "clock lengths must be > 0");
    }
  } else if (kind == "first_passage") {
    s.kind = ScenarioKind::first_passage;
    FirstPassageScenario& fp = s.first_passage;
    fp.lattice = parse_lattice(root);
    fp.mode = root.choice("mode", {"evolve", "zeno_scan", "nonhermitian"}, "evolve");
    if (fp.mode == "nonhermitian") {
      fp.gamma = root.number("gamma");
      if (!(fp.gamma > 0.0)) throw ScenarioError("gamma", "must be > 0");
    }
    if (fp.mode == "zeno_scan") {
      fp.t_fixed = root.number("t_fixed");
      if (!(fp.t_fixed > 0.0)) throw ScenarioError("t_fixed", "must be > 0");
      s.sweep = parse_sweep(root, {"tau"});
      for (double v : s.sweep->grid)
        if (!(v > 0.0)) throw ScenarioError("sweep.grid", "every tau must be > 0");
    }
  } else {
    s.kind = ScenarioKind::em_pulse;
    EmPulseScenario& em = s.em;
    em.pulse = parse_pulse(root);
    em.medium = parse_medium(root);
    em.mode = root.choice("mode", {"decomposition", "traces"}, "decomposition");
    if (em.mode == "decomposition")
      s.sweep = parse_sweep(root, {"carrier", "duration", "thickness", "strength", "damping", "resonance"});
  }
  root.finish();
  s.digest = fnv1a_digest(doc.dump());
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("<file>", "cannot open scenario file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError("<file>", std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

ResultTable run_scenario(const Scenario& scenario, unsigned workers) {
  switch (scenario.kind) {
    case ScenarioKind::timescale_sweep: return run_timescale(scenario, workers);
    case ScenarioKind::first_passage: return run_first_passage(scenario, workers);
    case ScenarioKind::em_pulse: return run_em(scenario, workers);
  }
  throw Error(ErrorCode::config, "unknown scenario kind");
}

std::string to_csv(const ResultTable& table) {
  std::ostringstream os;
  for (const auto& [k, v] : table.metadata) os << "# " << k << ": " << v << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << csv_escape(table.columns[c]);
  os << ",reason\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < table.rows[r].size(); ++c) os << (c ? "," : "") << format_number(table.rows[r][c]);
    os << ',' << csv_escape(r < table.reasons.size() ? table.reasons[r] : "") << '\n';
  }
  return os.str();
}

std::string to_json(const ResultTable& table) {
  json j;
  json meta = json::object();
  for (const auto& [k, v] : table.metadata) meta[k] = v;
  j["metadata"] = meta;
  j["columns"] = table.columns;
  json rows = json::array();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    json row = json::array();
    for (double v : table.rows[r]) {
      if (std::isfinite(v))
        row.push_back(json::parse(format_number(v)));
      else
        row.push_back(nullptr);
    }
    json entry;
    entry["values"] = row;
    entry["reason"] = r < table.reasons.size() ? table.reasons[r] : "";
    rows.push_back(entry);
  }
  j["rows"] = rows;
  return j.dump(1) + "\n";
}

ResultTable parse_csv(const std::string& text) {
  ResultTable t;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(": ");
      if (colon != std::string::npos && line.size() > 2)
        t.metadata.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
      continue;
    }
    std::vector<std::string> cells = split_csv_line(line);
    if (!header) {
      if (cells.empty() || cells.back() != "reason")
        throw Error(ErrorCode::validation, "line " + std::to_string(lineno) + ": header must end with 'reason'");
      cells.pop_back();
      t.columns = cells;
      header = true;
      continue;
    }
    if (cells.size() != t.columns.size() + 1)
      throw Error(ErrorCode::validation, "line " + std::to_string(lineno) + ": expected " +
                                             std::to_string(t.columns.size() + 1) + " cells");
    std::vector<double> row;
    for (std::size_t c = 0; c < t.columns.size(); ++c) row.push_back(parse_cell(cells[c], lineno));
    t.rows.push_back(std::move(row));
    t.reasons.push_back(cells.back());
  }
  if (!header) throw Error(ErrorCode::validation, "table has no header row");
  return t;
}

double Tolerances::for_column(const std::string& name) const {
  const auto it = per_column.find(name);
  return it == per_column.end() ? fallback : it->second;
}

Tolerances parse_tolerances(const std::string& spec) {
  Tolerances tol;
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    const std::string key = eq == std::string::npos ? "default" : item.substr(0, eq);
    const std::string value = eq == std::string::npos ? item : item.substr(eq + 1);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw ScenarioError("--tol", "'" + item + "' is not key=number");
    }
    if (!(v >= 0.0)) throw ScenarioError("--tol", "tolerance for '" + key + "' must be >= 0");
    if (key == "default")
      tol.fallback = v;
    else
      tol.per_column[key] = v;
  }
  return tol;
}

CompareReport compare(const ResultTable& table, const ResultTable& reference, const Tolerances& tol) {
  if (table.columns != reference.columns) {
    std::string a, b;
    for (const auto& c : table.columns) a += (a.empty() ? "" : ",") + c;
    for (const auto& c : reference.columns) b += (b.empty() ? "" : ",") + c;
    throw Error(ErrorCode::validation, "column mismatch: [" + a + "] vs [" + b + "]");
  }
  if (table.rows.size() != reference.rows.size())
    throw Error(ErrorCode::validation, "row count mismatch: " + std::to_string(table.rows.size()) + " vs " +
                                           std::to_string(reference.rows.size()));
  CompareReport rep;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const double a = table.rows[r][c];
      const double b = reference.rows[r][c];
      ++rep.cells;
      double rel = 0.0;
      bool ok = true;
      if (std::isnan(a) || std::isnan(b)) {
        ok = std::isnan(a) && std::isnan(b);
        rel = ok ? 0.0 : std::numeric_limits<double>::infinity();
      } else if (a != b) {
        const double scale = std::max(std::abs(a), std::abs(b));
        rel = std::abs(a - b) / (scale > 0.0 ? scale : 1.0);
        ok = rel <= tol.for_column(table.columns[c]);
      }
      if (!ok) rep.mismatches.push_back(CellMismatch{r, table.columns[c], a, b, rel});
    }
    const std::string ra = r < table.reasons.size() ? table.reasons[r] : "";
    const std::string rb = r < reference.reasons.size() ? reference.reasons[r] : "";
    if (ra.empty() != rb.empty()) rep.reason_mismatches.push_back(r);
  }
  rep.pass = rep.mismatches.empty() && rep.reason_mismatches.empty();
  return rep;
}

}  // namespace tunneltime
