#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11/CLI11.hpp>
#include <nlohmann/json.hpp>

#include "singosc/classical_mode.hpp"
#include "singosc/errors.hpp"
#include "singosc/format.hpp"
#include "singosc/states.hpp"
#include "singosc/transitions.hpp"
#include "singosc/trap_model.hpp"

namespace singosc::cli {

namespace {

using json = nlohmann::ordered_json;
using mode::FrequencyProfile;
using mode::ModeState;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProfileSpec {
  std::string kind = "constant";  // constant | resonance | ramp | table
  double omega = 1.0;
  double k = 0.02;
  bool unnormalized = false;
  double omega_i = 1.0;
  double omega_f = 1.1;
  double duration = 100.0;
  std::string table;
  double rel_tol = 1e-10;
  std::string mode_source = "integrate";  // integrate | analytic
};

struct GridSpec {
  std::optional<double> x_min, x_max;
  int points = 401;
};

struct RunConfig {
  std::string subcommand;
  ProfileSpec profile;
  std::string state = "number";
  int n = 0;
  double alpha_re = 0.0, alpha_im = 0.0, z_re = 0.0, z_im = 0.0;
  double d = 1e5;
  std::vector<double> times{0.0};
  std::string regime = "exact";
  bool symmetric = false;
  GridSpec grid;
  std::string output = "-";
  std::string sidecar;
  std::string format = "csv";
  std::string params_format = "json";
  trap::TrapParameters trap;
  double t1 = 40.0;
  std::optional<double> t0;
  std::optional<double> r, rd;
  int rows = 6, cols = 6;
  std::string figure;
  std::string output_dir = ".";
};

// ---------------------------------------------------------------- output ---

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      os_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw UsageError("cannot open '" + path + "' for writing");
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }
  void finish(const std::string& path) {
    os_->flush();
    if (!*os_) throw UsageError("failed writing '" + path + "'");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

void write_json_file(const std::string& path, const json& j, std::ostream& fallback) {
  Sink sink(path, fallback);
  *sink << j.dump(2) << '\n';
  sink.finish(path);
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

// --------------------------------------------------------------- profile ---

std::pair<std::vector<double>, std::vector<double>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read profile table '" + path + "'");
  std::vector<double> t, w2;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a, b;
    if (!(ls >> a >> b)) {
      if (lineno == 1) continue;  // header row
      throw UsageError("profile table '" + path + "': malformed line " + std::to_string(lineno));
    }
    t.push_back(a);
    w2.push_back(b);
  }
  return {t, w2};
}

FrequencyProfile build_profile(const ProfileSpec& p) {
  if (p.kind == "constant") return FrequencyProfile::constant(p.omega);
  if (p.kind == "resonance") return FrequencyProfile::parametric_resonance(p.k, !p.unnormalized);
  if (p.kind == "ramp") return mode::smooth_ramp(p.omega_i, p.omega_f, p.duration);
  if (p.kind == "table") {
    if (p.table.empty()) throw UsageError("--profile table requires --table FILE");
    auto [t, w2] = read_table(p.table);
    return FrequencyProfile::tabulated(std::move(t), std::move(w2));
  }
  throw UsageError("unknown profile '" + p.kind + "'");
}

double default_start(const ProfileSpec& p, const FrequencyProfile& profile) {
  if (p.kind == "ramp") return -0.5 * p.duration;
  if (p.kind == "table") return std::get<mode::TabulatedFrequency>(profile.kind()).times().front();
  return 0.0;
}

json profile_json(const ProfileSpec& p) {
  json j{{"profile", p.kind}};
  if (p.kind == "constant") j["omega"] = p.omega;
  if (p.kind == "resonance") {
    j["k"] = p.k;
    j["unnormalized_drive"] = p.unnormalized;
  }
  if (p.kind == "ramp") {
    j["omega_i"] = p.omega_i;
    j["omega_f"] = p.omega_f;
    j["duration"] = p.duration;
  }
  if (p.kind == "table") j["table"] = p.table;
  j["rtol"] = p.rel_tol;
  j["mode_source"] = p.mode_source;
  return j;
}

std::vector<ModeState> modes_at(const ProfileSpec& spec, const std::optional<double>& t0,
                                std::vector<double> times) {
  std::sort(times.begin(), times.end());
  if (spec.mode_source == "analytic") {
    if (spec.kind != "resonance") throw UsageError("--mode-source analytic is only available for --profile resonance");
    std::vector<ModeState> out;
    for (double t : times) out.push_back(mode::resonance_mode(spec.k, t));
    return out;
  }
  if (spec.mode_source != "integrate") throw UsageError("unknown mode source '" + spec.mode_source + "'");
  const auto profile = build_profile(spec);
  const double start = t0.value_or(default_start(spec, profile));
  return mode::mode_at_times(profile, start, times, spec.rel_tol);
}

// ----------------------------------------------------------------- states ---

states::StateSpec make_state(const RunConfig& c) {
  states::StateSpec s;
  s.d = c.d;
  if (c.state == "number") {
    if (c.n < 0) throw UsageError("--n must be nonnegative");
    s.kind = states::NumberState{c.n};
  } else if (c.state == "alpha") {
    s.kind = states::AlphaState{{c.alpha_re, c.alpha_im}};
  } else if (c.state == "z") {
    s.kind = states::ZState{{c.z_re, c.z_im}};
  } else {
    throw UsageError("unknown state '" + c.state + "'");
  }
  return s;
}

states::Regime parse_state_regime(const std::string& r) {
  if (r == "exact") return states::Regime::exact;
  if (r == "asymptotic") return states::Regime::asymptotic;
  throw UsageError("unknown density regime '" + r + "'");
}

// Mean and standard deviation of x^2 for the default grid extent.
std::pair<double, double> x2_spread(const states::StateSpec& s, const ModeState& m) {
  const double e2 = m.abs_eps_sq(), d = s.d;
  if (const auto* ns = std::get_if<states::NumberState>(&s.kind)) {
    const double n = ns->n;
    return {e2 * (2 * n + d + 1), e2 * std::sqrt(2 * n * n + 2 * n * (d + 1) + d + 1)};
  }
  if (const auto* zs = std::get_if<states::ZState>(&s.kind)) {
    const double mean = states::mean_x2_z(zs->z, d, m);
    return {mean, mean / std::sqrt(d + 1)};
  }
  const auto alpha = std::get<states::AlphaState>(s.kind).alpha;
  const double mean = states::moments(states::mean_B_alpha(alpha, d), std::conj(alpha * alpha), m).x2;
  return {mean, std::sqrt(e2 * e2 * (d + 1) + 4 * e2 * mean)};
}

std::pair<double, double> auto_range(const states::StateSpec& s, const std::vector<ModeState>& modes) {
  double lo2 = std::numeric_limits<double>::infinity(), hi2 = 0.0;
  for (const auto& m : modes) {
    const auto [mean, sd] = x2_spread(s, m);
    lo2 = std::min(lo2, mean - 6 * sd);
    hi2 = std::max(hi2, mean + 6 * sd);
  }
  const double hi = std::sqrt(hi2);
  const double lo = lo2 > 0 ? std::sqrt(lo2) : 1e-3 * hi;
  return {lo, hi};
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 2) throw UsageError("grid needs at least 2 points");
  if (!(lo > 0) || !(hi > lo)) throw UsageError("grid needs 0 < x-min < x-max");
  std::vector<double> xs(points);
  for (int i = 0; i < points; ++i) xs[i] = lo + (hi - lo) * i / (points - 1);
  return xs;
}

struct DensityResult {
  std::vector<states::DensityGrid> grids;
  double x_min, x_max;
};

DensityResult compute_densities(const RunConfig& c, const std::vector<ModeState>& modes) {
  const auto spec = make_state(c);
  const auto regime = parse_state_regime(c.regime);
  auto [lo, hi] = auto_range(spec, modes);
  if (c.grid.x_min) lo = *c.grid.x_min;
  if (c.grid.x_max) hi = *c.grid.x_max;
  const auto xs = linear_grid(lo, hi, c.grid.points);
  DensityResult res{{}, lo, hi};
  for (const auto& m : modes) res.grids.push_back(states::evaluate_grid(spec, m, xs, regime));
  return res;
}

void write_density_csv(std::ostream& os, const std::vector<states::DensityGrid>& grids, bool symmetric) {
  os << "t,x,density\n";
  for (const auto& g : grids) {
    const std::string t = format_real(g.mode_time);
    if (symmetric) {
      for (std::size_t i = g.x.size(); i-- > 0;) {
        os << t << ',' << format_real(-g.x[i]) << ',' << format_real(0.5 * g.density[i]) << '\n';
      }
    }
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      os << t << ',' << format_real(g.x[i]) << ',' << format_real(symmetric ? 0.5 * g.density[i] : g.density[i])
         << '\n';
    }
  }
}

json state_json(const RunConfig& c) {
  json j{{"state", c.state}, {"d", c.d}};
  if (c.state == "number") j["n"] = c.n;
  if (c.state == "alpha") j["alpha"] = {c.alpha_re, c.alpha_im};
  if (c.state == "z") j["z"] = {c.z_re, c.z_im};
  j["regime"] = c.regime;
  return j;
}

// ------------------------------------------------------------ transitions ---

double resolve_r(const RunConfig& c) {
  if (c.r && c.rd) throw UsageError("give either --r or --rd, not both");
  if (c.r) return *c.r;
  if (c.rd) {
    if (!(c.d > 0)) throw UsageError("--rd needs a positive --d");
    return *c.rd / c.d;
  }
  throw UsageError("transitions needs --r or --rd");
}

void write_matrix_csv(std::ostream& os, const transitions::TransitionMatrix& t) {
  os << 'n';
  for (int m = 0; m < t.cols; ++m) os << ",m" << m;
  os << '\n';
  for (int n = 0; n < t.rows; ++n) {
    os << n;
    for (int m = 0; m < t.cols; ++m) os << ',' << format_real(t.at(n, m));
    os << '\n';
  }
}

json matrix_json(const transitions::TransitionMatrix& t, bool with_entries) {
  json j{{"regime", transitions::to_string(t.regime)},
         {"d", t.d},
         {"r", t.r},
         {"rd", t.r * t.d},
         {"rows", t.rows},
         {"cols", t.cols},
         {"row_sums", t.row_sums},
         {"tail_bounds", t.tail_bounds},
         {"tail_onsets", t.tail_onsets},
         {"tail_bound", t.tail_bound}};
  if (with_entries) j["entries"] = t.entries;
  j["version"] = kVersion;
  return j;
}

// ----------------------------------------------------------------- figures ---

json manifest_base(const std::string& name, const std::vector<std::string>& args) {
  return json{{"figure", name}, {"version", kVersion}, {"argv", args}};
}

void figure_density(const std::string& name, int level, const RunConfig& c, const std::vector<std::string>& args,
                    std::ostream& out) {
  RunConfig fc = c;
  fc.state = "number";
  fc.n = level;
  fc.d = 1e5;
  fc.regime = "exact";
  fc.profile.kind = "resonance";
  fc.profile.k = 0.02;
  fc.profile.mode_source = "analytic";
  fc.times.clear();
  const int frames = 81;
  for (int i = 0; i < frames; ++i) fc.times.push_back(40.0 * i / (frames - 1));
  fc.grid.points = c.grid.points;
  const auto modes = modes_at(fc.profile, std::nullopt, fc.times);
  const auto res = compute_densities(fc, modes);

  const std::string csv = join_path(c.output_dir, name + ".csv");
  Sink sink(csv, out);
  write_density_csv(*sink, res.grids, false);
  sink.finish(csv);

  auto man = manifest_base(name, args);
  man["quantity"] = "|Psi_" + std::to_string(level) + "(x,t)|^2";
  man["columns"] = {"t", "x", "density"};
  man["parameters"] = state_json(fc);
  man["parameters"].update(profile_json(fc.profile));
  man["parameters"]["t"] = {{"from", 0.0}, {"to", 40.0}, {"frames", frames}};
  man["parameters"]["x"] = {{"from", res.x_min}, {"to", res.x_max}, {"points", fc.grid.points},
                            {"rule", "x^2 within 6 standard deviations of <x^2> over all frames"}};
  man["regenerate"] = {"singosc", "figure", name, "--points", std::to_string(fc.grid.points)};
  man["data"] = name + ".csv";
  write_json_file(join_path(c.output_dir, name + ".manifest.json"), man, out);
}

void figure_rd_sweep(const RunConfig& c, const std::vector<std::string>& args, std::ostream& out) {
  const std::string name = "fig3";
  const int level = 5;
  const std::vector<int> targets{0, 2, 5, 10};
  const int points = c.grid.points;
  const std::string csv = join_path(c.output_dir, name + ".csv");
  Sink sink(csv, out);
  *sink << "rd";
  for (int m : targets) *sink << ",W_" << level << '^' << m;
  *sink << '\n';
  for (int i = 0; i < points; ++i) {
    const double rd = 20.0 * i / (points - 1);
    *sink << format_real(rd);
    for (int m : targets) *sink << ',' << format_real(transitions::w_large_d(level, m, rd));
    *sink << '\n';
  }
  sink.finish(csv);

  auto man = manifest_base(name, args);
  man["quantity"] = "W_5^m(rd), large-d exponential form";
  man["columns"] = {"rd", "W_5^0", "W_5^2", "W_5^5", "W_5^10"};
  man["parameters"] = {{"n", level}, {"m", targets}, {"rd_from", 0.0}, {"rd_to", 20.0}, {"points", points},
                       {"regime", "large-d"}};
  man["regenerate"] = {"singosc", "figure", name, "--points", std::to_string(points)};
  man["data"] = name + ".csv";
  write_json_file(join_path(c.output_dir, name + ".manifest.json"), man, out);
}

void figure_matrix(const std::string& name, double r, const RunConfig& c, const std::vector<std::string>& args,
                   std::ostream& out) {
  const double d = 1e5;
  const int size = 16;
  const auto exact = transitions::transition_matrix(d, r, size, size, transitions::Regime::ExactJacobi);
  const auto large = transitions::transition_matrix(d, r, size, size, transitions::Regime::LargeD);
  const std::string csv = join_path(c.output_dir, name + ".csv");
  Sink sink(csv, out);
  *sink << "n,m,w_exact,w_large_d\n";
  for (int n = 0; n < size; ++n) {
    for (int m = 0; m < size; ++m) {
      *sink << n << ',' << m << ',' << format_real(exact.at(n, m)) << ',' << format_real(large.at(n, m)) << '\n';
    }
  }
  sink.finish(csv);

  auto man = manifest_base(name, args);
  man["quantity"] = "W_n^m matrix";
  man["columns"] = {"n", "m", "w_exact", "w_large_d"};
  man["parameters"] = {{"d", d}, {"r", r}, {"rd", r * d}, {"levels", size}, {"regimes", {"exact-jacobi", "large-d"}}};
  man["row_sums_exact"] = exact.row_sums;
  man["tail_bounds_exact"] = exact.tail_bounds;
  man["row_sums_large_d"] = large.row_sums;
  man["tail_bounds_large_d"] = large.tail_bounds;
  man["regenerate"] = {"singosc", "figure", name};
  man["data"] = name + ".csv";
  write_json_file(join_path(c.output_dir, name + ".manifest.json"), man, out);
}

// ------------------------------------------------------------- commands ---

void cmd_params(const RunConfig& c, std::ostream& out) {
  const auto p = trap::effective_params(c.trap);
  json j{{"inputs",
          {{"mu_ratio", c.trap.reduced_mass_ratio},
           {"voltage_V", c.trap.voltage_V},
           {"half_spacing_m", c.trap.half_spacing_m},
           {"charge", c.trap.charge}}},
         {"omega", p.omega},
         {"omega_g", p.omega_g},
         {"g_SI", p.g_SI},
         {"g_star", p.g_star},
         {"d", p.d},
         {"n_max", p.n_max},
         {"n_max_alt", p.n_max_alt},
         {"n_max_is_estimate", p.n_max_is_estimate},
         {"x_e", p.x_e},
         {"x_g", p.x_g},
         {"Omega_e", p.Omega_e},
         {"Omega_g", p.Omega_g},
         {"V_min", p.V_min},
         {"Vg_min", p.Vg_min},
         {"version", kVersion}};
  if (c.params_format == "json") {
    write_json_file(c.output, j, out);
    return;
  }
  if (c.params_format != "csv") throw UsageError("unknown format '" + c.params_format + "'");
  Sink sink(c.output, out);
  *sink << "key,value\n";
  for (const auto& [k, v] : j.items()) {
    if (v.is_number()) *sink << k << ',' << format_real(v.get<double>()) << '\n';
  }
  sink.finish(c.output);
}

void cmd_mode(const RunConfig& c, std::ostream& out) {
  if (c.profile.mode_source != "integrate") throw UsageError("mode integrates the profile; drop --mode-source");
  const auto profile = build_profile(c.profile);
  const double t0 = c.t0.value_or(default_start(c.profile, profile));
  const auto traj = mode::integrate_mode(profile, t0, c.t1, c.profile.rel_tol);
  Sink sink(c.output, out);
  mode::write_trajectory_csv(*sink, traj);
  sink.finish(c.output);

  const std::string side = !c.sidecar.empty() ? c.sidecar : (c.output == "-" ? "" : c.output + ".json");
  if (side.empty()) return;
  json j{{"t0", t0}, {"t1", c.t1}, {"steps", traj.states.size()}, {"max_wronskian_drift", traj.max_wronskian_drift}};
  j.update(profile_json(c.profile));
  const auto& last = traj.states.back();
  const double wf = profile.omega_final();
  try {
    const auto pair = mode::bogoliubov(last, wf);
    j["omega_f"] = wf;
    j["xi"] = {pair.xi.real(), pair.xi.imag()};
    j["eta"] = {pair.eta.real(), pair.eta.imag()};
    j["r"] = mode::reflection_coefficient(pair);
  } catch (const IntegrationError& e) {
    j["bogoliubov_error"] = e.what();
  }
  j["version"] = kVersion;
  write_json_file(side, j, out);
}

void cmd_density(const RunConfig& c, std::ostream& out) {
  if (c.times.empty()) throw UsageError("--times needs at least one value");
  const auto modes = modes_at(c.profile, c.t0, c.times);
  const auto res = compute_densities(c, modes);
  Sink sink(c.output, out);
  write_density_csv(*sink, res.grids, c.symmetric);
  sink.finish(c.output);
}

void cmd_transitions(const RunConfig& c, std::ostream& out) {
  const double r = resolve_r(c);
  const auto t = transitions::transition_matrix(c.d, r, c.rows, c.cols, transitions::regime_from_string(c.regime));
  if (c.format == "json") {
    write_json_file(c.output, matrix_json(t, true), out);
    return;
  }
  if (c.format != "csv") throw UsageError("unknown format '" + c.format + "'");
  Sink sink(c.output, out);
  write_matrix_csv(*sink, t);
  sink.finish(c.output);
  const std::string side = !c.sidecar.empty() ? c.sidecar : (c.output == "-" ? "" : c.output + ".json");
  if (!side.empty()) write_json_file(side, matrix_json(t, false), out);
}

void cmd_figure(const RunConfig& c, const std::vector<std::string>& args, std::ostream& out) {
  if (c.figure == "fig1") return figure_density("fig1", 0, c, args, out);
  if (c.figure == "fig2") return figure_density("fig2", 2, c, args, out);
  if (c.figure == "fig3") return figure_rd_sweep(c, args, out);
  if (c.figure == "fig4") return figure_matrix("fig4", 1e-6, c, args, out);
  if (c.figure == "fig5") return figure_matrix("fig5", 1e-5, c, args, out);
  if (c.figure == "fig6") return figure_matrix("fig6", 1e-4, c, args, out);
  throw UsageError("unknown figure '" + c.figure + "' (expected fig1..fig6)");
}

// ---------------------------------------------------------------- parsing ---

void add_profile_options(CLI::App* sub, ProfileSpec& p) {
  sub->add_option("--profile", p.kind, "constant | resonance | ramp | table");
  sub->add_option("--omega", p.omega, "constant profile frequency");
  sub->add_option("--k", p.k, "parametric resonance depth");
  sub->add_flag("--unnormalized-drive", p.unnormalized, "resonance drive 1 + k cos 2t without the 1/(1+k) factor");
  sub->add_option("--omega-i", p.omega_i, "ramp initial frequency");
  sub->add_option("--omega-f", p.omega_f, "ramp final frequency");
  sub->add_option("--duration", p.duration, "ramp duration");
  sub->add_option("--table", p.table, "CSV of (t, omega^2) rows");
  sub->add_option("--rtol", p.rel_tol, "integrator relative tolerance");
}

std::optional<std::string> find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      return args[i + 1];
    }
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

std::vector<std::string> strip_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      ++i;
      continue;
    }
    if (args[i].rfind("--config=", 0) == 0) continue;
    out.push_back(args[i]);
  }
  return out;
}

bool is_true(const std::string& v) { return v == "1" || v == "true" || v == "yes" || v == "on"; }

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config '" + path + "'");
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config '" + path + "' line " + std::to_string(lineno) + ": expected key=value");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::runtime_error("config '" + path + "' line " + std::to_string(lineno) + ": empty key");
    kv.emplace_back(key, value);
  }
  return kv;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Time-dependent singular oscillator: mode dynamics, state densities, transition probabilities",
               "singosc"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  app.footer("Flat key=value config files are read with --config FILE; keys are long flag names\n"
             "(e.g. d = 1e5) and `command = <subcommand>` may select the subcommand. Flags override the file.");

  auto* params = app.add_subcommand("params", "trap parameters -> model constants (JSON)");
  params->add_option("--mu-ratio", c.trap.reduced_mass_ratio, "reduced mass in electron masses");
  params->add_option("--voltage", c.trap.voltage_V, "end-cap voltage U in volts");
  params->add_option("--half-spacing", c.trap.half_spacing_m, "half electrode spacing L in metres");
  params->add_option("--charge", c.trap.charge, "ion charge in elementary charges");
  params->add_option("--format", c.params_format, "json | csv");
  params->add_option("-o,--output", c.output, "output file (- for stdout)");

  auto* mode_cmd = app.add_subcommand("mode", "integrate the classical mode (CSV trajectory + JSON sidecar)");
  add_profile_options(mode_cmd, c.profile);
  mode_cmd->add_option("--t0", c.t0, "start time (default: profile start)");
  mode_cmd->add_option("--t1", c.t1, "end time");
  mode_cmd->add_option("-o,--output", c.output, "trajectory CSV (- for stdout)");
  mode_cmd->add_option("--sidecar", c.sidecar, "summary JSON path (default: <output>.json)");

  auto* density = app.add_subcommand("density", "probability density on an x grid (CSV t,x,density)");
  add_profile_options(density, c.profile);
  density->add_option("--mode-source", c.profile.mode_source, "integrate | analytic (resonance only)");
  density->add_option("--t0", c.t0, "integration start time (default: profile start)");
  density->add_option("--state", c.state, "number | alpha | z");
  density->add_option("--n", c.n, "number-state level");
  density->add_option("--alpha-re", c.alpha_re);
  density->add_option("--alpha-im", c.alpha_im);
  density->add_option("--z-re", c.z_re);
  density->add_option("--z-im", c.z_im);
  density->add_option("--d", c.d, "repulsion index d");
  density->add_option("--times", c.times, "comma-separated output times")->delimiter(',');
  density->add_option("--regime", c.regime, "exact | asymptotic");
  density->add_option("--x-min", c.grid.x_min);
  density->add_option("--x-max", c.grid.x_max);
  density->add_option("--points", c.grid.points, "grid points");
  density->add_flag("--symmetric", c.symmetric, "mirror onto x < 0 with half weight per side");
  density->add_option("-o,--output", c.output, "output CSV (- for stdout)");

  auto* trans = app.add_subcommand("transitions", "transition matrix W_n^m (CSV + JSON sidecar)");
  trans->add_option("--d", c.d, "repulsion index d");
  trans->add_option("--r", c.r, "reflection coefficient");
  trans->add_option("--rd", c.rd, "product r*d (r = rd/d)");
  trans->add_option("--rows", c.rows);
  trans->add_option("--cols", c.cols);
  trans->add_option("--regime", c.regime,
                    "exact-jacobi | exact-hypergeom | oscillator | large-d | large-d-poisson | adiabatic");
  trans->add_option("--format", c.format, "csv | json");
  trans->add_option("-o,--output", c.output, "output file (- for stdout)");
  trans->add_option("--sidecar", c.sidecar, "row sums / tail bounds JSON (default: <output>.json)");

  auto* fig = app.add_subcommand("figure", "regenerate the data behind fig1..fig6");
  fig->add_option("name", c.figure, "fig1 | fig2 | fig3 | fig4 | fig5 | fig6")->required();
  fig->add_option("--output-dir", c.output_dir, "directory for <name>.csv and <name>.manifest.json");
  fig->add_option("--points", c.grid.points, "grid points (x for fig1-2, rd for fig3)");

  std::vector<std::string> args;
  try {
    args = strip_config(raw_args);
    if (const auto cfg = find_config(raw_args)) {
      const auto kv = read_config(*cfg);
      std::vector<std::string> injected;
      std::string command;
      for (const auto& [k, v] : kv) {
        if (k == "command") {
          command = v;
          continue;
        }
        if (k == "name") {
          injected.push_back(v);
          continue;
        }
        const bool is_flag = k == "symmetric" || k == "unnormalized-drive";
        if (is_flag) {
          if (is_true(v)) injected.push_back("--" + k);
        } else {
          injected.push_back("--" + k);
          injected.push_back(v);
        }
      }
      auto pos = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
        return a == "params" || a == "mode" || a == "density" || a == "transitions" || a == "figure";
      });
      if (pos == args.end()) {
        if (command.empty()) throw UsageError("no subcommand given on the command line or as `command` in the config");
        args.insert(args.begin(), command);
        pos = args.begin();
      }
      args.insert(pos + 1, injected.begin(), injected.end());
    }
  } catch (const std::exception& e) {
    err << "singosc: " << e.what() << '\n';
    return kUsage;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "singosc: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (params->parsed()) {
      cmd_params(c, out);
    } else if (mode_cmd->parsed()) {
      cmd_mode(c, out);
    } else if (density->parsed()) {
      cmd_density(c, out);
    } else if (trans->parsed()) {
      cmd_transitions(c, out);
    } else if (fig->parsed()) {
      std::vector<std::string> full{"singosc"};
      full.insert(full.end(), raw_args.begin(), raw_args.end());
      cmd_figure(c, full, out);
    }
  } catch (const UsageError& e) {
    err << "singosc: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "singosc: " << e.what() << '\n';
    return kNumericalDomain;
  } catch (const IntegrationError& e) {
    err << "singosc: " << e.what() << '\n';
    return kNumericalDomain;
  } catch (const std::exception& e) {
    err << "singosc: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

}  // namespace singosc::cli
