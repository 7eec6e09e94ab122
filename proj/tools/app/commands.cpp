#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "conekit/analysis.hpp"
#include "conekit/error.hpp"
#include "conekit/indicial.hpp"
#include "conekit/spaces.hpp"

namespace conekit::app {

namespace fs = std::filesystem;

namespace {

std::string real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : path_(path), out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
    if (!out_) throw Error("write failed: " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

void write_status(const fs::path& dir, const std::string& line) {
  std::ofstream out(dir / "status");
  out << line << '\n';
}

double tip_opening(const GeometryConfig& g) { return g.kind == geometry::ProfileKind::sphere ? 1.0 : g.c; }

Field initial_field(const RunConfig& cfg, const geometry::MeshPtr& mesh) {
  const auto& d = cfg.dynamics;
  const int K = cfg.geometry.K;
  switch (d.ic) {
    case InitialData::zero: return Field(mesh, K);
    case InitialData::constant: return Field::constant(mesh, K, d.ic_amplitude);
    case InitialData::eigenmode: {
      const auto sys = ops::eigendecompose_mode(mesh, d.ic_mode);
      const auto v = sys.vector(d.ic_mode == 0 ? 1 : 0);
      Field u(mesh, K);
      std::copy(v.begin(), v.end(), u.component(Field::cos_component(d.ic_mode)).begin());
      const double sup = dynamics::sup_norm(u);
      return sup > 0.0 ? u * (d.ic_amplitude / sup) : u;
    }
    case InitialData::random: break;
  }
  return dynamics::random_initial_field(mesh, K, d.seed, d.ic_amplitude, dynamics::IcScale::sup_norm,
                                        d.ic_mean_zero);
}

void write_snapshot(const fs::path& path, double t, const Field& u) {
  std::ofstream out(path);
  out << "t = " << real(t) << '\n' << "K = " << u.max_mode() << '\n' << "M = " << u.cells() << '\n';
  for (int i = 0; i < u.cells(); ++i) {
    for (int c = 0; c < u.components(); ++c) out << (c ? " " : "") << real(u.component(c)[static_cast<std::size_t>(i)]);
    out << '\n';
  }
}

void write_diagnostics(const fs::path& path, const std::vector<dynamics::DiagnosticsRecord>& records) {
  Csv csv(path, {"t", "mass", "energy", "h1_seminorm", "ut_h01dual", "mellin_s0", "mellin_s1", "max_abs_u",
                 "energy_increase"});
  for (const auto& r : records) {
    csv.row({real(r.t), real(r.mass), real(r.energy), real(r.h1_seminorm), real(r.ut_h01dual), real(r.mellin_s0),
             real(r.mellin_s1), real(r.max_abs_u), r.energy_increase ? "1" : "0"});
  }
}

struct Outcome {
  int exit_code = kExitOk;
  std::string status = "ok";
  Summary summary;
};

Outcome run_simulation(const RunConfig& cfg, const fs::path& dir, std::ostream* log,
                       dynamics::RunResult* keep = nullptr) {
  const auto mesh = make_mesh(cfg.geometry);
  const Field u0 = initial_field(cfg, mesh);
  const auto stepper = stepper_config(cfg, mesh->profile());
  dynamics::RunOptions options;
  options.keep_stride = cfg.dynamics.snapshot_every * cfg.dynamics.snapshot_stride;
  auto result = dynamics::run_semiflow(u0, stepper, options);
  write_diagnostics(dir / "diagnostics.csv", result.records);
  write_snapshot(dir / "snapshot_initial.txt", 0.0, u0);
  for (std::size_t i = 0; i < result.kept_states.size(); ++i) {
    char name[48];
    std::snprintf(name, sizeof name, "snapshot_%010lld.txt", std::llround(result.kept_times[i] / stepper.dt));
    write_snapshot(dir / name, result.kept_times[i], result.kept_states[i]);
  }
  write_snapshot(dir / "snapshot_final.txt", result.final_state.t(), result.final_state.u);
  Outcome out;
  out.summary = {{"result", std::string(dynamics::to_string(result.status))},
                 {"final_t", real(result.final_state.t())},
                 {"steps", std::to_string(result.final_state.step)},
                 {"final_energy", real(result.records.empty() ? result.initial.energy : result.records.back().energy)},
                 {"mass_drift", real(result.mass_drift)},
                 {"max_energy_increase", real(result.max_energy_increase)}};
  if (log) {
    *log << "simulate: " << dynamics::to_string(result.status) << " at t = " << result.final_state.t() << " after "
         << result.final_state.step << " steps\n";
  }
  if (result.status == dynamics::RunStatus::stability_violated ||
      result.status == dynamics::RunStatus::numerical_failure) {
    out.exit_code = kExitNumerical;
    out.status = "numerical_abort: " + result.message;
  } else {
    out.status = "ok result=" + std::string(dynamics::to_string(result.status));
  }
  if (keep) *keep = std::move(result);
  return out;
}

Outcome cmd_indicial(const RunConfig& cfg, const fs::path& dir, std::ostream* log) {
  const auto profile = make_profile(cfg.geometry);
  const auto spectrum = geometry::boundary_spectrum(*profile, cfg.geometry.K);
  const auto report = indicial::indicial_report(1, spectrum, cfg.norms.gamma);
  const auto in_space = [&](const indicial::IndicialRoot& r) {
    for (const auto& m : report.asymptotics.members) {
      if (m.mode == r.mode && m.value == r.value) return true;
    }
    return false;
  };
  Csv csv(dir / "indicial.csv",
          {"operator", "mode", "boundary_multiplicity", "root", "root_exact", "multiplicity", "log_power", "in_window"});
  if (log) {
    *log << "convention: roots q of x^{+q}; gamma = " << format_real(cfg.norms.gamma) << "\n";
    *log << std::left << std::setw(9) << "operator" << std::setw(6) << "mode" << std::setw(22) << "root"
         << std::setw(10) << "log_power" << "in_window\n";
  }
  auto emit = [&](const std::vector<indicial::IndicialRoot>& roots) {
    for (const auto& r : roots) {
      const bool bi = r.op == indicial::Operator::bilaplacian;
      const std::string win = bi ? (in_space(r) ? "yes" : "no") : "-";
      csv.row({std::string(indicial::to_string(r.op)), std::to_string(r.mode), std::to_string(r.boundary_multiplicity),
               real(r.real()), r.value.str(), std::to_string(r.multiplicity), std::to_string(r.log_power_max), win});
      if (log) {
        *log << std::left << std::setw(9) << indicial::to_string(r.op) << std::setw(6) << r.mode << std::setw(22)
             << r.value.str() << std::setw(10) << r.log_power_max << win << "\n";
      }
    }
  };
  emit(report.laplacian_roots);
  emit(report.bilaplacian_roots);

  Csv windows(dir / "windows.csv", {"window", "lower", "upper", "nonempty", "closed_lower"});
  windows.row({"ch", real(report.ch_window.lower), real(report.ch_window.upper), report.ch_window.nonempty ? "1" : "0", "0"});
  windows.row({"laplacian", real(report.laplacian_window.lower), real(report.laplacian_window.upper),
               report.laplacian_window.nonempty ? "1" : "0", "0"});
  windows.row({"asymptotic", real(report.asymptotics.lower()), real(report.asymptotics.upper()), "1", "1"});
  if (log) {
    *log << "CH window (" << format_real(report.ch_window.lower) << ", " << format_real(report.ch_window.upper) << ")\n"
         << "Laplacian window (" << format_real(report.laplacian_window.lower) << ", "
         << format_real(report.laplacian_window.upper) << ")\n"
         << "asymptotic window [" << format_real(report.asymptotics.lower()) << ", "
         << format_real(report.asymptotics.upper()) << ")\n";
  }

  Csv domain(dir / "domain.csv", {"check", "holds", "offending"});
  auto offending = [](const indicial::DomainCheck& c) {
    std::string s;
    for (const auto& h : c.offending) s += (s.empty() ? "" : " ") + h.value.str() + "@" + std::to_string(h.mode);
    return s;
  };
  domain.row({"minimal_domain", report.minimal_domain.holds ? "1" : "0", offending(report.minimal_domain)});
  domain.row({"laplacian_minimal_domain", report.laplacian_minimal_domain.holds ? "1" : "0",
              offending(report.laplacian_minimal_domain)});
  Csv excl(dir / "interpolation_exclusions.csv", {"alpha"});
  for (double a : report.exclusions) excl.row({real(a)});

  Outcome out;
  out.summary = {{"convention", std::string(indicial::to_string(report.convention))},
                 {"exact", report.exact ? "true" : "false"},
                 {"asymptotic_members", std::to_string(report.asymptotics.members.size())},
                 {"minimal_domain", report.minimal_domain.holds ? "true" : "false"}};
  return out;
}

Outcome cmd_spectrum(const RunConfig& cfg, const fs::path& dir, std::ostream* log) {
  const auto mesh = make_mesh(cfg.geometry);
  struct Entry {
    double value;
    int mode;
  };
  std::vector<Entry> entries;
  const int count = cfg.experiment.eig_count;
  Csv csv(dir / "spectrum.csv", {"k", "index", "mu", "multiplicity"});
  for (int k = 0; k <= cfg.geometry.K; ++k) {
    const auto values = spaces::smallest_eigenvalues(mesh, k, count);
    for (std::size_t j = 0; j < values.size(); ++j) {
      csv.row({std::to_string(k), std::to_string(j), real(values[j]), k == 0 ? "1" : "2"});
      entries.push_back({values[j], k});
      if (k > 0) entries.push_back({values[j], k});
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });
  if (static_cast<int>(entries.size()) > count) entries.resize(static_cast<std::size_t>(count));

  const auto boundary = geometry::boundary_spectrum(mesh->profile(), cfg.geometry.K);
  Csv bcsv(dir / "boundary_spectrum.csv", {"mode", "lambda", "multiplicity", "exact"});
  for (const auto& e : boundary.entries) {
    const std::string exact = e.exact ? std::to_string(e.exact->num) + "/" + std::to_string(e.exact->den) : "";
    bcsv.row({std::to_string(e.mode), real(e.lambda), std::to_string(e.multiplicity), exact});
  }
  const double mu1 = spaces::first_nonzero_eigenvalue(mesh, cfg.geometry.K);
  if (log) {
    *log << "lowest eigenvalues of -Delta:";
    for (const auto& e : entries) *log << ' ' << e.value;
    *log << "\nPoincare constant " << 1.0 / std::sqrt(mu1) << "\n";
  }
  Outcome out;
  out.summary = {{"first_nonzero_eigenvalue", real(mu1)},
                 {"poincare_constant", real(1.0 / std::sqrt(mu1))},
                 {"area", real(mesh->area())}};
  return out;
}

Outcome cmd_norms(const RunConfig& cfg, const fs::path& dir, std::ostream* log) {
  const auto profile = make_profile(cfg.geometry);
  const auto make_field = [&](geometry::MeshPtr mesh) {
    if (cfg.dynamics.ic == InitialData::random) {
      return smooth_test_field(mesh, cfg.geometry.K, cfg.dynamics.seed, cfg.dynamics.ic_amplitude);
    }
    return initial_field(cfg, mesh);
  };
  const auto omega = spaces::CutoffFunction::default_for(*profile);
  Csv csv(dir / "norms.csv", {"name", "s", "gamma", "value", "divergence_flag", "value_M", "value_2M", "value_4M"});
  Outcome out;
  for (const auto& [order, gamma] : cfg.norms.pairs) {
    const auto rep = spaces::mellin_norm_refined(make_field, profile, cfg.geometry.M, cfg.geometry.q, order, gamma, omega);
    csv.row({"mellin", std::to_string(order), real(gamma), real(rep.value), rep.divergent ? "1" : "0", real(rep.sequence[0]),
             real(rep.sequence[1]), real(rep.sequence[2])});
    if (log) {
      *log << "Mellin norm s=" << order << " gamma=" << format_real(gamma) << ": "
           << (rep.divergent ? std::string("divergent") : real(rep.value)) << "\n";
    }
  }
  const Field u = make_field(geometry::build_mesh(profile, cfg.geometry.M, cfg.geometry.q));
  const double mean = spaces::mean(u);
  out.summary = {{"l2_norm", real(l2_norm(u))},
                 {"h1_seminorm", real(spaces::h1_seminorm(u))},
                 {"mean", real(mean)},
                 {"h01_dual_norm_of_mean_free_part", real(spaces::h01_dual_norm(spaces::mean_projected(u)))}};
  return out;
}

Outcome cmd_attractor(const RunConfig& cfg, const fs::path& dir, std::ostream* log) {
  const auto mesh = make_mesh(cfg.geometry);
  analysis::AbsorbingConfig a;
  a.radii = cfg.experiment.radii;
  a.seeds = cfg.experiment.seeds;
  a.base_seed = cfg.dynamics.seed;
  a.level = cfg.experiment.absorb_level;
  a.diameter_stride = cfg.experiment.diameter_stride;
  a.stepper = stepper_config(cfg, mesh->profile());
  const auto report = analysis::absorbing_set_experiment(mesh, cfg.geometry.K, a);
  Csv members(dir / "absorbing.csv", {"radius", "seed", "entered", "entry_time", "kappa", "kappa_mellin", "final_time", "status"});
  for (const auto& m : report.members) {
    members.row({real(m.radius), std::to_string(m.seed), m.entered ? "1" : "0", real(m.entry_time), real(m.kappa),
                 real(m.kappa_mellin), real(m.final_time), std::string(dynamics::to_string(m.status))});
  }
  Csv radii(dir / "absorbing_radii.csv", {"radius", "entry_time", "kappa", "kappa_mellin"});
  for (std::size_t i = 0; i < report.radii.size(); ++i) {
    radii.row({real(report.radii[i]), real(report.entry_times[i]), real(report.kappa[i]), real(report.kappa_mellin[i])});
  }
  Csv diam(dir / "diameter.csv", {"t", "diameter"});
  for (std::size_t i = 0; i < report.diameter.size(); ++i) diam.row({real(report.diameter_times[i]), real(report.diameter[i])});
  Outcome out;
  out.summary = {{"common_entry_time", real(report.common_entry_time)},
                 {"max_diameter_increase", real(report.max_diameter_increase)}};
  for (std::size_t i = 0; i < report.radii.size(); ++i) {
    out.summary.emplace_back("kappa_R" + format_real(report.radii[i]), real(report.kappa[i]));
  }
  if (log) {
    for (std::size_t i = 0; i < report.radii.size(); ++i) {
      *log << "R = " << report.radii[i] << ": entry " << report.entry_times[i] << ", kappa " << report.kappa[i] << "\n";
    }
  }
  for (const auto& m : report.members) {
    if (m.status == dynamics::RunStatus::stability_violated || m.status == dynamics::RunStatus::numerical_failure) {
      out.exit_code = kExitNumerical;
      out.status = "numerical_abort: member seed " + std::to_string(m.seed) + ": " + m.message;
    }
  }
  return out;
}

Outcome cmd_fit(const RunConfig& cfg, const fs::path& dir, std::ostream* log) {
  const auto mesh = make_mesh(cfg.geometry);
  const double opening = tip_opening(cfg.geometry);
  Csv csv(dir / "fits.csv",
          {"mode", "rho", "expected", "log_coefficient", "s_a", "s_b", "r_squared", "samples", "message"});
  Outcome out;
  for (int k : cfg.experiment.fit_modes) {
    const Field psi = analysis::poisson_probe(mesh, cfg.geometry.K, k);
    const auto fit = analysis::fit_tip_asymptotics(psi, k);
    csv.row({std::to_string(k), real(fit.rho), real(k / opening), real(fit.log_coefficient), real(fit.window.s_a),
             real(fit.window.s_b), real(fit.r_squared), std::to_string(fit.samples), fit.message});
    out.summary.emplace_back("rho_mode" + std::to_string(k), real(fit.rho));
    if (log) *log << "mode " << k << ": rho = " << fit.rho << " (k/c = " << k / opening << ")\n";
  }
  return out;
}

Outcome cmd_ls(const RunConfig& cfg, const fs::path& dir, std::ostream* log) {
  dynamics::RunResult run;
  Outcome out = run_simulation(cfg, dir, log, &run);
  if (out.exit_code != kExitOk) return out;
  const auto probe = analysis::lojasiewicz_probe(run.records, cfg.experiment.tail_fraction);
  Csv samples(dir / "ls_samples.csv", {"t", "log_gap", "log_grad"});
  for (const auto& s : probe.samples) samples.row({real(s.t), real(s.log_gap), real(s.log_grad)});
  Csv summary(dir / "ls.csv", {"theta", "slope", "r_squared", "energy_limit", "t_begin", "t_end", "within_bound"});
  summary.row({real(probe.theta), real(probe.slope), real(probe.r_squared), real(probe.energy_limit),
               real(probe.t_begin), real(probe.t_end), probe.within_bound ? "1" : "0"});
  out.summary.emplace_back("theta", real(probe.theta));
  out.summary.emplace_back("within_bound", probe.within_bound ? "true" : "false");
  if (log) *log << "theta = " << probe.theta << (probe.within_bound ? "" : " (outside (0, 0.55])") << "\n";
  return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"indicial", "spectrum", "norms", "simulate",
                                              "attractor", "fit-asymptotics", "ls-probe"};
  return names;
}

std::string current_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
  return buf;
}

fs::path make_run_dir(const fs::path& base, const std::string& cmd, const std::string& timestamp) {
  fs::create_directories(base);
  const std::string stem = timestamp + "-" + cmd;
  fs::path dir = base / stem;
  for (int n = 1; fs::exists(dir); ++n) dir = base / (stem + "-" + std::to_string(n));
  fs::create_directory(dir);
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& cmd, const RunConfig& cfg, const std::string& timestamp,
                    const Summary& summary) {
  const fs::path path = dir / "manifest.ini";
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "[run]\n"
      << "command = " << cmd << '\n'
      << "version = " << CONEKIT_VERSION << '\n'
      << "seed = " << cfg.dynamics.seed << '\n'
      << "timestamp = " << timestamp << '\n';
  for (std::size_t i = 0; i < cfg.warnings.size(); ++i) out << "warning" << i << " = " << cfg.warnings[i] << '\n';
  for (const auto& [section, keys] : config_sections(cfg)) {
    out << '\n' << '[' << section << "]\n";
    for (const auto& [k, v] : keys) out << k << " = " << v << '\n';
  }
  if (!summary.empty()) {
    out << "\n[summary]\n";
    for (const auto& [k, v] : summary) out << k << " = " << v << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

Field smooth_test_field(geometry::MeshPtr mesh, int max_mode, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int kmax = std::min(max_mode, 4);
  std::vector<double> a(static_cast<std::size_t>(kmax) + 1);
  std::vector<double> b(static_cast<std::size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) {
    a[static_cast<std::size_t>(k)] = gauss(rng) / (1.0 + k * k);
    b[static_cast<std::size_t>(k)] = gauss(rng) / (1.0 + k * k);
  }
  const auto& profile = mesh->profile();
  const double length = profile.length();
  Field u = Field::from_function(mesh, max_mode, [&](double s, double theta) {
    const double radial = std::cos(std::numbers::pi * s / length);
    double v = a[0] * radial;
    for (int k = 1; k <= kmax; ++k) {
      const double shape = std::pow(profile.radius(s) / (1.0 + profile.radius(s)), k);
      v += shape * (a[static_cast<std::size_t>(k)] * std::cos(k * theta) + b[static_cast<std::size_t>(k)] * std::sin(k * theta));
    }
    return v;
  });
  return u * amplitude;
}

DispatchResult dispatch(const std::string& cmd, const RunConfig& cfg, const RunContext& ctx) {
  if (std::find(command_names().begin(), command_names().end(), cmd) == command_names().end()) {
    throw ValidationError("unknown command '" + cmd + "'");
  }
  const std::string timestamp = ctx.timestamp.empty() ? current_timestamp() : ctx.timestamp;
  DispatchResult result;
  result.run_dir = make_run_dir(ctx.out_base, cmd, timestamp);
  write_manifest(result.run_dir, cmd, cfg, timestamp, {});
  Outcome outcome;
  try {
    if (cmd == "indicial") outcome = cmd_indicial(cfg, result.run_dir, ctx.log);
    else if (cmd == "spectrum") outcome = cmd_spectrum(cfg, result.run_dir, ctx.log);
    else if (cmd == "norms") outcome = cmd_norms(cfg, result.run_dir, ctx.log);
    else if (cmd == "simulate") outcome = run_simulation(cfg, result.run_dir, ctx.log);
    else if (cmd == "attractor") outcome = cmd_attractor(cfg, result.run_dir, ctx.log);
    else if (cmd == "fit-asymptotics") outcome = cmd_fit(cfg, result.run_dir, ctx.log);
    else outcome = cmd_ls(cfg, result.run_dir, ctx.log);
  } catch (const ValidationError& e) {
    outcome.exit_code = kExitValidation;
    outcome.status = std::string("validation_error: ") + e.what();
  } catch (const NumericalError& e) {
    outcome.exit_code = kExitNumerical;
    outcome.status = std::string("numerical_abort: ") + e.what();
  }
  write_manifest(result.run_dir, cmd, cfg, timestamp, outcome.summary);
  write_status(result.run_dir, outcome.status);
  result.exit_code = outcome.exit_code;
  result.status = outcome.status;
  return result;
}

}  // namespace conekit::app
