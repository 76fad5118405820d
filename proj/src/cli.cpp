#include "bcsh/cli.hpp"

#include "bcsh/validation.hpp"

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

namespace bcsh {

namespace {

namespace pt = boost::property_tree;

constexpr int kSchemaVersion = 1;
constexpr std::size_t kHardSiteCeiling = 7;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"model", {"mu", "h", "lambda", "gamma"}},
      {"thermo", {"beta"}},
      {"grid",
       {"c_min", "c_max", "count", "param1", "min1", "max1", "count1", "param2", "min2", "max2",
        "count2"}},
      {"gap", {"r_max", "scan_points"}},
      {"dynamics",
       {"integrator", "step", "abs_tol", "rel_tol", "horizon", "samples", "convention"}},
      {"state", {"preset", "kappa", "theta", "d", "m", "w", "c_re", "c_im", "beta", "values"}},
      {"converge", {"sites", "observable", "max_sites"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& where, const std::string& text, bool allow_inf = false) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(where + ": '" + text + "' is not a number");
  }
  if (std::isnan(v) || (std::isinf(v) && !(allow_inf && v > 0.0))) {
    throw ConfigError(where + ": '" + text + "' is not a finite number");
  }
  return v;
}

std::size_t parse_count(const std::string& where, const std::string& text) {
  const std::string s = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(where + ": '" + text + "' is not a non-negative integer");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  std::optional<std::string> get(const std::string& key) const {
    if (tree_ == nullptr) return std::nullopt;
    if (auto v = tree_->get_optional<std::string>(pt::ptree::path_type(key, '\0'))) {
      return trim(*v);
    }
    return std::nullopt;
  }
  void number(const std::string& key, double& target, bool allow_inf = false) const {
    if (auto v = get(key)) target = parse_double(where(key), *v, allow_inf);
  }
  void count(const std::string& key, std::size_t& target) const {
    if (auto v = get(key)) target = parse_count(where(key), *v);
  }
  void text(const std::string& key, std::string& target) const {
    if (auto v = get(key)) target = *v;
  }
  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

 private:
  const pt::ptree* tree_;
  std::string name_;
};

Section section(const pt::ptree& root, const std::string& name) {
  const auto it = root.find(name);
  return Section(it == root.not_found() ? nullptr : &it->second, name);
}

void check_axis(const GridAxis& axis, const std::string& label) {
  if (axis.count < 1) throw ConfigError(label + ": count must be >= 1");
  if (axis.count > 1 && !(axis.max >= axis.min)) {
    throw ConfigError(label + ": max must be >= min");
  }
}

// Table output shared by the CSV and JSON writers.
using Cell = std::variant<double, std::int64_t, bool>;

struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string json_number(double x) { return std::isfinite(x) ? format_number(x) : "null"; }

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::string render_cell(const Cell& cell, bool json) {
  if (const double* d = std::get_if<double>(&cell)) return json ? json_number(*d) : format_number(*d);
  if (const bool* b = std::get_if<bool>(&cell)) return json ? (*b ? "true" : "false") : (*b ? "1" : "0");
  return std::to_string(std::get<std::int64_t>(cell));
}

std::string json_header(const RunConfig& cfg, const std::string& command) {
  std::ostringstream os;
  os << "{\"schema_version\":" << kSchemaVersion << ",\"command\":" << json_string(command)
     << ",\"model\":{\"mu\":" << json_number(cfg.model.mu) << ",\"h\":" << json_number(cfg.model.h)
     << ",\"lambda\":" << json_number(cfg.model.lambda)
     << ",\"gamma\":" << json_number(cfg.model.gamma) << "},\"beta\":"
     << (cfg.thermo.is_ground_state() ? std::string("\"inf\"") : json_number(cfg.thermo.beta));
  return os.str();
}

void write_table(const RunConfig& cfg, const Table& table, std::ostream& out) {
  const OutputFormat format = cfg.format.value_or(OutputFormat::csv);
  if (format == OutputFormat::csv) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      out << (i ? "," : "") << table.columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << render_cell(row[i], false);
      out << '\n';
    }
    return;
  }
  out << json_header(cfg, table.command) << ",\"columns\":[";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << json_string(table.columns[i]);
  }
  out << "],\"rows\":[";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << (r ? "," : "") << '[';
    for (std::size_t i = 0; i < table.rows[r].size(); ++i) {
      out << (i ? "," : "") << render_cell(table.rows[r][i], true);
    }
    out << ']';
  }
  out << "]}\n";
}

void validate_common(const RunConfig& cfg) {
  try {
    cfg.model.validate();
    cfg.thermo.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

RunConfig parse_config(const std::string& text) {
  pt::ptree root;
  try {
    std::istringstream is(text);
    pt::ini_parser::read_ini(is, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [name, body] : root) {
    const auto it = known_keys().find(name);
    if (it == known_keys().end() || body.empty()) {
      throw ConfigError("config: unknown section or top-level key '" + name + "'");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) {
        throw ConfigError("config: unknown key '" + key + "' in [" + name + "]");
      }
    }
  }

  RunConfig cfg;
  const Section model = section(root, "model");
  model.number("mu", cfg.model.mu);
  model.number("h", cfg.model.h);
  model.number("lambda", cfg.model.lambda);
  model.number("gamma", cfg.model.gamma);

  section(root, "thermo").number("beta", cfg.thermo.beta, true);

  const Section grid = section(root, "grid");
  grid.number("c_min", cfg.pressure_grid.min);
  grid.number("c_max", cfg.pressure_grid.max);
  grid.count("count", cfg.pressure_grid.count);
  grid.text("param1", cfg.axis1.param);
  grid.number("min1", cfg.axis1.min);
  grid.number("max1", cfg.axis1.max);
  grid.count("count1", cfg.axis1.count);
  grid.text("param2", cfg.axis2.param);
  grid.number("min2", cfg.axis2.min);
  grid.number("max2", cfg.axis2.max);
  grid.count("count2", cfg.axis2.count);

  const Section gap = section(root, "gap");
  gap.number("r_max", cfg.gap.r_max);
  gap.count("scan_points", cfg.gap.scan_points);

  const Section dyn = section(root, "dynamics");
  if (auto v = dyn.get("integrator")) {
    if (*v == "adaptive") cfg.dynamics.integrator = Integrator::adaptive;
    else if (*v == "rk4") cfg.dynamics.integrator = Integrator::rk4;
    else throw ConfigError(dyn.where("integrator") + ": expected adaptive or rk4");
  }
  if (auto v = dyn.get("convention")) {
    if (*v == "down_up") cfg.dynamics.convention = PairConvention::down_up;
    else if (*v == "up_down") cfg.dynamics.convention = PairConvention::up_down;
    else throw ConfigError(dyn.where("convention") + ": expected down_up or up_down");
  }
  dyn.number("step", cfg.dynamics.step);
  dyn.number("abs_tol", cfg.dynamics.abs_tol);
  dyn.number("rel_tol", cfg.dynamics.rel_tol);
  dyn.number("horizon", cfg.horizon);
  dyn.count("samples", cfg.samples);

  const Section state = section(root, "state");
  state.text("preset", cfg.state.preset);
  state.number("kappa", cfg.state.kappa);
  state.number("theta", cfg.state.theta);
  state.number("d", cfg.state.d);
  state.number("m", cfg.state.m);
  state.number("w", cfg.state.w);
  double c_re = 0.0, c_im = 0.0;
  state.number("c_re", c_re);
  state.number("c_im", c_im);
  cfg.state.c = {c_re, c_im};
  if (state.get("beta")) {
    double b = 0.0;
    state.number("beta", b, true);
    cfg.state.beta = b;
  }
  if (auto v = state.get("values")) {
    for (const std::string& item : split_list(*v)) {
      cfg.state.raw.push_back(parse_double(state.where("values"), item));
    }
  }

  const Section conv = section(root, "converge");
  if (auto v = conv.get("sites")) {
    cfg.sites.clear();
    for (const std::string& item : split_list(*v)) {
      cfg.sites.push_back(parse_count(conv.where("sites"), item));
    }
  }
  conv.text("observable", cfg.observable);
  conv.count("max_sites", cfg.max_sites);

  // Structural checks; physical ranges are checked per command.
  check_axis(cfg.pressure_grid, "[grid] c_min/c_max/count");
  check_axis(cfg.axis1, "[grid] axis 1");
  check_axis(cfg.axis2, "[grid] axis 2");
  if (cfg.pressure_grid.min < 0.0) throw ConfigError("[grid] c_min must be >= 0");
  if (cfg.gap.scan_points < 3) throw ConfigError("[gap] scan_points must be >= 3");
  if (!(cfg.gap.r_max > 0.0)) throw ConfigError("[gap] r_max must be > 0");
  if (cfg.samples < 2) throw ConfigError("[dynamics] samples must be >= 2");
  if (!(cfg.horizon > 0.0)) throw ConfigError("[dynamics] horizon must be > 0");
  if (cfg.sites.empty()) throw ConfigError("[converge] sites must not be empty");
  for (std::size_t n : cfg.sites) {
    if (n == 0) throw ConfigError("[converge] sites must be >= 1");
  }
  if (cfg.max_sites < 1 || cfg.max_sites > kHardSiteCeiling) {
    throw ConfigError("[converge] max_sites must lie in 1.." + std::to_string(kHardSiteCeiling));
  }
  cfg.dynamics.times = DynamicsConfig::uniform_times(cfg.horizon, cfg.samples);
  try {
    cfg.dynamics.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[dynamics] ") + e.what());
  }
  named_observable(cfg.observable);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

OnSiteOperator raw_density(const std::vector<double>& v) {
  if (v.size() != 16) {
    throw ConfigError("[state] values: expected 16 numbers, got " + std::to_string(v.size()));
  }
  OnSiteOperator d = OnSiteOperator::Zero();
  for (int k = 0; k < 4; ++k) d(k, k) = v[k];
  int idx = 4;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      d(i, j) = cplx(v[idx], v[idx + 1]);
      d(j, i) = std::conj(d(i, j));
      idx += 2;
    }
  }
  return d;
}

OnSiteState build_initial_state(const RunConfig& cfg) {
  const StateSpec& s = cfg.state;
  if (s.preset == "vacuum-pair-mix") return vacuum_pair_mix(s.kappa, s.theta, s.d, s.m, s.w);
  if (s.preset == "approx-gibbs") {
    const ThermoParams t{s.beta.value_or(cfg.thermo.beta)};
    try {
      t.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("[state] beta: ") + e.what());
    }
    return approx_gibbs_onsite(cfg.model, t, s.c).state;
  }
  if (s.preset == "raw") return OnSiteState::even(raw_density(s.raw));
  throw ConfigError("[state] preset: expected vacuum-pair-mix, approx-gibbs or raw");
}

OnSiteOperator named_observable(const std::string& name) {
  if (name == "pair") return onsite_pair_annihilator();
  if (name == "n_up") return onsite_op(OpKind::number, Spin::up);
  if (name == "n_down") return onsite_op(OpKind::number, Spin::down);
  if (name == "n") return onsite_op(OpKind::number, Spin::up) + onsite_op(OpKind::number, Spin::down);
  if (name == "double_occupancy") {
    return onsite_op(OpKind::number, Spin::up) * onsite_op(OpKind::number, Spin::down);
  }
  if (name == "a_up") return onsite_op(OpKind::annihilate, Spin::up);
  if (name == "a_down") return onsite_op(OpKind::annihilate, Spin::down);
  throw ConfigError("[converge] observable: unknown name '" + name + "'");
}

void cmd_pressure(const RunConfig& cfg, std::ostream& out) {
  validate_common(cfg);
  Table table{"pressure", {"c_modulus", "functional", "onsite_pressure"}, {}};
  for (double r : cfg.pressure_grid.values()) {
    table.rows.push_back({r, variational_functional(cfg.model, cfg.thermo, r),
                          onsite_pressure(cfg.model, cfg.thermo, r)});
  }
  write_table(cfg, table, out);
}

void cmd_gap(const RunConfig& cfg, std::ostream& out) {
  validate_common(cfg);
  const OrderParameterSolution sol = solve_gap(cfg.model, cfg.thermo, cfg.gap);
  if (cfg.format.value_or(OutputFormat::json) == OutputFormat::csv) {
    RunConfig csv = cfg;
    csv.format = OutputFormat::csv;
    write_table(csv,
                {"gap",
                 {"r_star", "value", "residual", "superconducting", "degenerate", "at_boundary",
                  "multistart_spread"},
                 {{sol.r_star, sol.value, sol.residual, sol.superconducting, sol.degenerate,
                   sol.at_boundary, sol.multistart_spread}}},
                out);
    return;
  }
  out << json_header(cfg, "gap") << ",\"r_star\":" << json_number(sol.r_star)
      << ",\"value\":" << json_number(sol.value) << ",\"residual\":" << json_number(sol.residual)
      << ",\"superconducting\":" << (sol.superconducting ? "true" : "false")
      << ",\"degenerate\":" << (sol.degenerate ? "true" : "false")
      << ",\"at_boundary\":" << (sol.at_boundary ? "true" : "false")
      << ",\"multistart_spread\":" << json_number(sol.multistart_spread) << ",\"maximizers\":[";
  for (std::size_t i = 0; i < sol.maximizers.size(); ++i) {
    out << (i ? "," : "") << json_number(sol.maximizers[i]);
  }
  out << "]}\n";
}

void cmd_phase_diagram(const RunConfig& cfg, std::ostream& out) {
  validate_common(cfg);
  std::vector<PhaseDiagramRow> rows;
  try {
    rows = phase_diagram(cfg.model, cfg.thermo, cfg.axis1, cfg.axis2, cfg.workers, cfg.gap);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[grid] ") + e.what());
  }
  Table table{"phase-diagram", {"param1", "param2", "r_star", "superconducting", "d", "m", "w"}, {}};
  for (const PhaseDiagramRow& r : rows) {
    table.rows.push_back({r.param1, r.param2, r.r_star, r.superconducting, r.d, r.m, r.w});
  }
  write_table(cfg, table, out);
}

void cmd_dynamics(const RunConfig& cfg, std::ostream& out) {
  validate_common(cfg);
  const OnSiteState rho0 = build_initial_state(cfg);
  const SelfConsistentTrajectory traj = evolve_self_consistent(cfg.model, rho0, cfg.dynamics);

  std::vector<cplx> pair;
  for (const ObservableRecord& r : traj.records) pair.push_back(r.pair);
  double nu_fit = std::numeric_limits<double>::quiet_NaN();
  if (std::abs(pair.front()) > 1e-12) {
    try {
      nu_fit = fit_phase_slope(traj.times, pair);
    } catch (const std::invalid_argument&) {
      // field vanishes somewhere or sampling is too coarse to unwrap
    }
  }

  Table table{"dynamics",
              {"t", "d", "m", "w", "pair_re", "pair_im", "Omega1", "Omega2", "Omega3", "nu_fit"},
              {}};
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const ObservableRecord& r = traj.records[i];
    const RotorVector w = rotor_from_state(cfg.model, traj.states[i]);
    table.rows.push_back({r.t, r.d, r.m, r.w, r.pair.real(), r.pair.imag(), w.omega1, w.omega2,
                          w.omega3, nu_fit});
  }
  write_table(cfg, table, out);
}

void cmd_converge(const RunConfig& cfg, std::ostream& out) {
  validate_common(cfg);
  const OnSiteState rho0 = build_initial_state(cfg);
  const std::vector<ConvergenceRow> rows =
      convergence_study(cfg.model, rho0, named_observable(cfg.observable), cfg.sites,
                        cfg.dynamics, cfg.max_sites);
  Table table{"converge",
              {"N", "t", "exact_re", "exact_im", "meanfield_re", "meanfield_im", "abs_error"},
              {}};
  for (const ConvergenceRow& r : rows) {
    table.rows.push_back({static_cast<std::int64_t>(r.site_count), r.t, r.exact.real(),
                          r.exact.imag(), r.mean_field.real(), r.mean_field.imag(), r.abs_error});
  }
  write_table(cfg, table, out);
}

int cmd_validate(std::ostream& out, bool corrupt_sector_energy,
                 const std::vector<std::string>& only) {
  ValidationOptions options;
  options.corrupt_sector_energy = corrupt_sector_energy;
  std::vector<CheckResult> results;
  const std::vector<std::string> ids = only.empty() ? validation_check_ids() : only;
  for (const std::string& id : ids) {
    results.push_back(run_check(id, options));
    out << format_report({results.back()}) << std::flush;
  }
  const auto passed = std::count_if(results.begin(), results.end(),
                                    [](const CheckResult& r) { return r.passed; });
  out << passed << "/" << results.size() << " checks passed\n";
  return all_passed(results) ? kExitOk : kExitFailure;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"BCS-Hubbard lattice fermions: thermodynamics, dynamics and validation",
               "bcsh"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_path, format_name;
  unsigned workers = 1;
  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--out", out_path, "output file (default: standard output)");
  app.add_option("--workers", workers, "worker threads for grid scans")
      ->check(CLI::Range(1u, 1024u));
  app.add_option("--format", format_name, "output format")->check(CLI::IsMember({"csv", "json"}));

  const std::vector<std::pair<std::string, std::string>> commands{
      {"pressure", "variational functional and on-site pressure along |c|"},
      {"gap", "maximize the variational functional"},
      {"phase-diagram", "order parameter and densities on a two-parameter grid"},
      {"dynamics", "self-consistent one-site dynamics from a product state"},
      {"converge", "exact N-site dynamics against the self-consistent flow"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  CLI::App* validate = app.add_subcommand("validate", "run the acceptance suite");
  bool corrupt = false, list = false;
  std::vector<std::string> only;
  validate->add_flag("--corrupt-sector-energy", corrupt)->group("");
  validate->add_flag("--list", list, "list check identifiers and exit");
  validate->add_option("--check", only, "run only these checks");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    if (sub == "validate") {
      if (list) {
        for (const std::string& id : validation_check_ids()) out << id << '\n';
        return kExitOk;
      }
      const std::vector<std::string> known = validation_check_ids();
      for (const std::string& id : only) {
        if (std::find(known.begin(), known.end(), id) == known.end()) {
          throw ConfigError("validate: unknown check '" + id + "'");
        }
      }
      std::ofstream file;
      if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) throw ConfigError("cannot write output file '" + out_path + "'");
      }
      return cmd_validate(out_path.empty() ? out : file, corrupt, only);
    }

    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    cfg.subcommand = sub;
    cfg.workers = workers;
    cfg.out_path = out_path;
    if (!format_name.empty()) {
      cfg.format = format_name == "json" ? OutputFormat::json : OutputFormat::csv;
    }

    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path, std::ios::binary);
      if (!file) throw ConfigError("cannot write output file '" + out_path + "'");
    }
    std::ostringstream buffer;
    if (sub == "pressure") cmd_pressure(cfg, buffer);
    else if (sub == "gap") cmd_gap(cfg, buffer);
    else if (sub == "phase-diagram") cmd_phase_diagram(cfg, buffer);
    else if (sub == "dynamics") cmd_dynamics(cfg, buffer);
    else if (sub == "converge") cmd_converge(cfg, buffer);
    (out_path.empty() ? out : file) << buffer.str();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidStateError& e) {
    err << "invalid state: " << e.what() << '\n';
    return kExitInvalidState;
  } catch (const ResourceLimitError& e) {
    err << "resource limit: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace bcsh
