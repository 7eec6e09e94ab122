#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "conekit/error.hpp"

namespace conekit::app {

namespace {

std::string trim(std::string s) {
  boost::algorithm::trim(s);
  return s;
}

double to_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  const auto slash = t.find('/');
  if (slash != std::string::npos) {
    const double num = to_real(key, t.substr(0, slash));
    const double den = to_real(key, t.substr(slash + 1));
    if (den == 0.0) throw ValidationError(key + ": zero denominator in '" + t + "'");
    return num / den;
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) {
    throw ValidationError(key + ": expected a real number, got '" + t + "'");
  }
  return value;
}

long long to_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ValidationError(key + ": expected an integer, got '" + t + "'");
  }
  return value;
}

bool to_flag(const std::string& key, const std::string& text) {
  const std::string t = boost::algorithm::to_lower_copy(trim(text));
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ValidationError(key + ": expected true or false, got '" + t + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::algorithm::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    auto t = trim(p);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::string_view to_string(InitialData ic) {
  switch (ic) {
    case InitialData::random: return "random";
    case InitialData::zero: return "zero";
    case InitialData::constant: return "constant";
    case InitialData::eigenmode: return "eigenmode";
  }
  return "random";
}

InitialData parse_ic(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  for (auto ic : {InitialData::random, InitialData::zero, InitialData::constant, InitialData::eigenmode}) {
    if (t == to_string(ic)) return ic;
  }
  throw ValidationError(key + ": unknown initial data '" + t + "' (random, zero, constant, eigenmode)");
}

std::string flag(bool b) { return b ? "true" : "false"; }

struct Pending {
  bool gamma_set = false;
  bool pairs_set = false;
};

using Setter = std::function<void(RunConfig&, Pending&, const std::string& key, const std::string& value)>;

const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Setter>>>>& key_table() {
  static const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Setter>>>> table = {
      {"geometry",
       {
           {"kind", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
              try {
                c.geometry.kind = geometry::parse_profile_kind(trim(v));
              } catch (const std::exception&) {
                throw ValidationError(k + ": unknown profile kind '" + trim(v) + "' (sphere, cone_capped, spindle)");
              }
            }},
           {"radius", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.geometry.radius = to_real(k, v); }},
           {"c", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.geometry.c = to_real(k, v); }},
           {"c2", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.geometry.c2 = to_real(k, v); }},
           {"L", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.geometry.L = to_real(k, v); }},
           {"M", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.geometry.M = static_cast<int>(to_integer(k, v)); }},
           {"q", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.geometry.q = to_real(k, v); }},
           {"K", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.geometry.K = static_cast<int>(to_integer(k, v)); }},
       }},
      {"dynamics",
       {
           {"dt", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.dynamics.dt = to_real(k, v); }},
           {"S", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.dynamics.S = to_real(k, v); }},
           {"T_max", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.dynamics.T_max = to_real(k, v); }},
           {"eq_tol", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.dynamics.eq_tol = to_real(k, v); }},
           {"seed", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
              const long long s = to_integer(k, v);
              if (s < 0) throw ValidationError(k + ": seed must be nonnegative");
              c.dynamics.seed = static_cast<std::uint64_t>(s);
            }},
           {"linear_only", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.dynamics.linear_only = to_flag(k, v); }},
           {"snapshot_stride", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.dynamics.snapshot_stride = static_cast<int>(to_integer(k, v)); }},
           {"snapshot_every", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.dynamics.snapshot_every = static_cast<int>(to_integer(k, v)); }},
           {"adaptive_S", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.dynamics.adaptive_S = to_flag(k, v); }},
           {"ic", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.dynamics.ic = parse_ic(k, v); }},
           {"ic_amplitude", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.dynamics.ic_amplitude = to_real(k, v); }},
           {"ic_mode", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.dynamics.ic_mode = static_cast<int>(to_integer(k, v)); }},
           {"ic_mean_zero", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.dynamics.ic_mean_zero = to_flag(k, v); }},
       }},
      {"norms",
       {
           {"gamma", [](RunConfig& c, Pending& p, const std::string& k, const std::string& v) {
              c.norms.gamma = to_real(k, v);
              p.gamma_set = true;
            }},
           {"pairs", [](RunConfig& c, Pending& p, const std::string& k, const std::string& v) {
              c.norms.pairs.clear();
              for (const auto& item : split_list(v)) {
                const auto colon = item.find(':');
                if (colon == std::string::npos) throw ValidationError(k + ": expected order:gamma items, got '" + item + "'");
                c.norms.pairs.emplace_back(static_cast<int>(to_integer(k, item.substr(0, colon))),
                                           to_real(k, item.substr(colon + 1)));
              }
              p.pairs_set = true;
            }},
           {"allow_out_of_window", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.norms.allow_out_of_window = to_flag(k, v); }},
       }},
      {"experiment",
       {
           {"radii", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
              c.experiment.radii.clear();
              for (const auto& item : split_list(v)) c.experiment.radii.push_back(to_real(k, item));
            }},
           {"seeds", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.experiment.seeds = static_cast<int>(to_integer(k, v)); }},
           {"absorb_level", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.experiment.absorb_level = to_real(k, v); }},
           {"diameter_stride", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.experiment.diameter_stride = static_cast<int>(to_integer(k, v)); }},
           {"tail_fraction", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.experiment.tail_fraction = to_real(k, v); }},
           {"fit_modes", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
              c.experiment.fit_modes.clear();
              for (const auto& item : split_list(v)) c.experiment.fit_modes.push_back(static_cast<int>(to_integer(k, item)));
            }},
           {"eig_count", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.experiment.eig_count = static_cast<int>(to_integer(k, v)); }},
       }},
  };
  return table;
}

const Setter& find_setter(const std::string& name, std::string& canonical) {
  std::string section;
  std::string key = name;
  if (const auto dot = name.find('.'); dot != std::string::npos) {
    section = name.substr(0, dot);
    key = name.substr(dot + 1);
  }
  for (const auto& [sec, keys] : key_table()) {
    if (!section.empty() && sec != section) continue;
    for (const auto& [k, setter] : keys) {
      if (k == key) {
        canonical = sec + "." + k;
        return setter;
      }
    }
  }
  throw ValidationError("unknown configuration key '" + name + "'");
}

void validate(RunConfig& cfg, bool allow_out_of_window) {
  const auto& g = cfg.geometry;
  if (g.M < geometry::kMinCells) throw ValidationError("geometry.M must be at least " + std::to_string(geometry::kMinCells));
  if (g.K < 0) throw ValidationError("geometry.K must be nonnegative");
  if (!(g.q > 0.0 && g.q <= 1.0)) throw ValidationError("geometry.q must lie in (0, 1]");
  if (!(g.c > 0.0)) throw ValidationError("geometry.c must be positive");
  if (!(g.c2 > 0.0)) throw ValidationError("geometry.c2 must be positive");
  if (!(g.L > 0.0)) throw ValidationError("geometry.L must be positive");
  if (!(g.radius > 0.0)) throw ValidationError("geometry.radius must be positive");
  const auto& d = cfg.dynamics;
  if (!(d.dt > 0.0)) throw ValidationError("dynamics.dt must be positive");
  if (!(d.S >= 0.0)) throw ValidationError("dynamics.S must be nonnegative");
  if (!(d.T_max >= 0.0)) throw ValidationError("dynamics.T_max must be nonnegative");
  if (!(d.eq_tol > 0.0)) throw ValidationError("dynamics.eq_tol must be positive");
  if (d.snapshot_stride < 1) throw ValidationError("dynamics.snapshot_stride must be at least 1");
  if (d.snapshot_every < 0) throw ValidationError("dynamics.snapshot_every must be nonnegative");
  if (d.ic_mode < 0 || d.ic_mode > g.K) throw ValidationError("dynamics.ic_mode must lie in [0, K]");
  const auto& e = cfg.experiment;
  if (e.radii.empty()) throw ValidationError("experiment.radii must not be empty");
  for (double r : e.radii) {
    if (!(r > 0.0)) throw ValidationError("experiment.radii must be positive");
  }
  if (e.seeds < 2) throw ValidationError("experiment.seeds must be at least 2");
  if (!(e.absorb_level > 0.0)) throw ValidationError("experiment.absorb_level must be positive");
  if (e.diameter_stride < 1) throw ValidationError("experiment.diameter_stride must be at least 1");
  if (!(e.tail_fraction > 0.0 && e.tail_fraction <= 1.0)) throw ValidationError("experiment.tail_fraction must lie in (0, 1]");
  for (int k : e.fit_modes) {
    if (k < 0 || k > g.K) throw ValidationError("experiment.fit_modes must lie in [0, K]");
  }
  if (e.eig_count < 1) throw ValidationError("experiment.eig_count must be positive");

  // Validates the profile parameters as a side effect.
  const auto profile = make_profile(g);
  (void)profile;

  auto& n = cfg.norms;
  n.allow_out_of_window = n.allow_out_of_window || allow_out_of_window;
  for (const auto& [order, gamma] : n.pairs) {
    if (order < 0 || order > 2) throw ValidationError("norms.pairs: order must be 0, 1 or 2");
    (void)gamma;
  }
  const auto window = ch_window_for(g);
  std::vector<double> gammas{n.gamma};
  for (const auto& p : n.pairs) gammas.push_back(p.second);
  for (double gamma : gammas) {
    if (window.contains(gamma)) continue;
    const std::string what = "norms.gamma = " + format_real(gamma) + " lies outside the CH window (" +
                             format_real(window.lower) + ", " + format_real(window.upper) + ")";
    if (!n.allow_out_of_window) {
      throw ValidationError(what + "; pass --allow-out-of-window to override");
    }
    cfg.warnings.push_back(what);
  }
}

}  // namespace

std::string format_real(double x) {
  // Shortest text that parses back to the same double.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Assignments read_config_text(const std::string& text) {
  std::ostringstream cleaned;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    // Inline comments after a value.
    for (const char* marker : {" #", "\t#", " ;", "\t;"}) {
      if (const auto pos = line.find(marker); pos != std::string::npos) line.erase(pos);
    }
    cleaned << line << '\n';
  }
  boost::property_tree::ptree tree;
  std::istringstream in(cleaned.str());
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  Assignments out;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      out.emplace_back(name, node.data());
      continue;
    }
    if (name == "run" || name == "summary") continue;
    for (const auto& [key, leaf] : node) {
      if (!leaf.empty()) throw ValidationError("config: nested section under [" + name + "]");
      out.emplace_back(name + "." + key, leaf.data());
    }
  }
  return out;
}

Assignments read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return read_config_text(text.str());
}

RunConfig parse_config(const Assignments& assignments, bool allow_out_of_window) {
  RunConfig cfg;
  Pending pending;
  for (const auto& [name, value] : assignments) {
    std::string canonical;
    const Setter& setter = find_setter(trim(name), canonical);
    setter(cfg, pending, canonical, value);
  }
  if (!pending.gamma_set) cfg.norms.gamma = ch_window_for(cfg.geometry).midpoint();
  if (!pending.pairs_set) cfg.norms.pairs = {{0, cfg.norms.gamma}, {1, cfg.norms.gamma}};
  validate(cfg, allow_out_of_window);
  return cfg;
}

std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> config_sections(
    const RunConfig& cfg) {
  const auto& g = cfg.geometry;
  const auto& d = cfg.dynamics;
  const auto& n = cfg.norms;
  const auto& e = cfg.experiment;
  std::string pairs;
  for (const auto& [order, gamma] : n.pairs) {
    if (!pairs.empty()) pairs += ", ";
    pairs += std::to_string(order) + ":" + format_real(gamma);
  }
  std::string radii;
  for (double r : e.radii) radii += (radii.empty() ? "" : ", ") + format_real(r);
  std::string modes;
  for (int k : e.fit_modes) modes += (modes.empty() ? "" : ", ") + std::to_string(k);
  return {
      {"geometry",
       {{"kind", std::string(geometry::to_string(g.kind))},
        {"radius", format_real(g.radius)},
        {"c", format_real(g.c)},
        {"c2", format_real(g.c2)},
        {"L", format_real(g.L)},
        {"M", std::to_string(g.M)},
        {"q", format_real(g.q)},
        {"K", std::to_string(g.K)}}},
      {"dynamics",
       {{"dt", format_real(d.dt)},
        {"S", format_real(d.S)},
        {"T_max", format_real(d.T_max)},
        {"eq_tol", format_real(d.eq_tol)},
        {"seed", std::to_string(d.seed)},
        {"linear_only", flag(d.linear_only)},
        {"snapshot_stride", std::to_string(d.snapshot_stride)},
        {"snapshot_every", std::to_string(d.snapshot_every)},
        {"adaptive_S", flag(d.adaptive_S)},
        {"ic", std::string(to_string(d.ic))},
        {"ic_amplitude", format_real(d.ic_amplitude)},
        {"ic_mode", std::to_string(d.ic_mode)},
        {"ic_mean_zero", flag(d.ic_mean_zero)}}},
      {"norms",
       {{"gamma", format_real(n.gamma)}, {"pairs", pairs}, {"allow_out_of_window", flag(n.allow_out_of_window)}}},
      {"experiment",
       {{"radii", radii},
        {"seeds", std::to_string(e.seeds)},
        {"absorb_level", format_real(e.absorb_level)},
        {"diameter_stride", std::to_string(e.diameter_stride)},
        {"tail_fraction", format_real(e.tail_fraction)},
        {"fit_modes", modes},
        {"eig_count", std::to_string(e.eig_count)}}},
  };
}

std::shared_ptr<const geometry::SurfaceProfile> make_profile(const GeometryConfig& g) {
  std::vector<double> params;
  switch (g.kind) {
    case geometry::ProfileKind::sphere: params = {g.radius}; break;
    case geometry::ProfileKind::cone_capped: params = {g.c, g.L}; break;
    case geometry::ProfileKind::spindle: params = {g.c, g.c2, g.L}; break;
  }
  return std::make_shared<const geometry::SurfaceProfile>(geometry::build_profile(g.kind, params));
}

geometry::MeshPtr make_mesh(const GeometryConfig& g) { return geometry::build_mesh(make_profile(g), g.M, g.q); }

indicial::GammaWindow ch_window_for(const GeometryConfig& g) {
  const double opening = g.kind == geometry::ProfileKind::sphere ? 1.0 : g.c;
  return indicial::ch_gamma_window(1, -1.0 / (opening * opening));
}

dynamics::StepperConfig stepper_config(const RunConfig& cfg, const geometry::SurfaceProfile& profile) {
  dynamics::StepperConfig s;
  s.dt = cfg.dynamics.dt;
  s.S = cfg.dynamics.S;
  s.T_max = cfg.dynamics.T_max;
  s.eq_tol = cfg.dynamics.eq_tol;
  s.linear_only = cfg.dynamics.linear_only;
  s.snapshot_stride = cfg.dynamics.snapshot_stride;
  s.adaptive_S = cfg.dynamics.adaptive_S;
  s.mellin = dynamics::MellinSettings{cfg.norms.gamma, spaces::CutoffFunction::default_for(profile)};
  return s;
}

}  // namespace conekit::app
