#include "config.hpp"

#include "uc/error.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ucverify {

namespace pt = boost::property_tree;
using uc::ConfigError;

namespace {

const std::set<std::string> kSections = {"run", "geometry", "frame", "system", "carleman", "demo", "diff"};

double to_double(const std::string& s, bool& ok) {
  const std::string t = boost::trim_copy(s);
  double v = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  ok = ec == std::errc() && p == t.data() + t.size() && !t.empty();
  return v;
}

}  // namespace

IniFile IniFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

IniFile IniFile::parse(const std::string& text, const std::string& origin) {
  IniFile f;
  f.origin_ = origin;
  std::istringstream in(text);
  try {
    pt::read_ini(in, f.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}:{}: {}", origin, e.line(), e.message()));
  }
  // Line numbers for diagnostics; the parser above has already accepted the syntax.
  std::istringstream lines(text);
  std::string line, section;
  for (int no = 1; std::getline(lines, line); ++no) {
    boost::trim(line);
    if (line.empty() || line[0] == ';' || line[0] == '#') continue;
    if (line.front() == '[') {
      section = boost::trim_copy(line.substr(1, line.find(']') - 1));
      if (!kSections.count(section)) throw ConfigError(fmt::format("{}:{}: unknown section [{}]", origin, no, section));
      f.lines_[{section, ""}] = no;
      continue;
    }
    const auto eq = line.find('=');
    if (section.empty()) {
      throw ConfigError(fmt::format("{}:{}: key outside of a section", origin, no));
    }
    f.lines_[{section, boost::trim_copy(line.substr(0, eq))}] = no;
  }
  return f;
}

bool IniFile::has(const std::string& section, const std::string& key) const {
  return lines_.count({section, key}) > 0;
}

std::optional<std::string> IniFile::raw(const std::string& section, const std::string& key) const {
  if (!has(section, key)) return std::nullopt;
  read_.insert({section, key});
  return tree_.get<std::string>(pt::ptree::path_type(section + "/" + key, '/'));
}

std::string IniFile::where(const std::string& section, const std::string& key) const {
  auto it = lines_.find({section, key});
  const std::string line = it == lines_.end() ? "?" : std::to_string(it->second);
  return fmt::format("{}:{}: [{}] {}", origin_, line, section, key);
}

void IniFile::fail(const std::string& section, const std::string& key, const std::string& message) const {
  throw ConfigError(fmt::format("{}: {}", where(section, key), message));
}

std::string IniFile::get_string(const std::string& section, const std::string& key,
                                const std::string& fallback) const {
  auto v = raw(section, key);
  return v ? boost::trim_copy(*v) : fallback;
}

double IniFile::get_double(const std::string& section, const std::string& key, double fallback) const {
  auto v = raw(section, key);
  if (!v) return fallback;
  bool ok = false;
  const double d = to_double(*v, ok);
  if (!ok || !std::isfinite(d)) fail(section, key, fmt::format("expected a number, got '{}'", *v));
  return d;
}

long IniFile::get_int(const std::string& section, const std::string& key, long fallback) const {
  auto v = raw(section, key);
  if (!v) return fallback;
  const std::string t = boost::trim_copy(*v);
  long x = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    fail(section, key, fmt::format("expected an integer, got '{}'", *v));
  return x;
}

bool IniFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  auto v = raw(section, key);
  if (!v) return fallback;
  const std::string t = boost::to_lower_copy(boost::trim_copy(*v));
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  fail(section, key, fmt::format("expected true or false, got '{}'", *v));
}

std::vector<double> IniFile::get_list(const std::string& section, const std::string& key,
                                      const std::vector<double>& fallback) const {
  auto v = raw(section, key);
  if (!v) return fallback;
  std::vector<std::string> items;
  boost::split(items, *v, boost::is_any_of(","));
  std::vector<double> out;
  for (const auto& item : items) {
    std::vector<std::string> parts;
    boost::split(parts, item, boost::is_any_of(":"));
    std::vector<double> x;
    for (const auto& p : parts) {
      bool ok = false;
      x.push_back(to_double(p, ok));
      if (!ok) fail(section, key, fmt::format("bad list entry '{}'", boost::trim_copy(item)));
    }
    if (x.size() == 1) {
      out.push_back(x[0]);
    } else if (x.size() <= 3) {
      const double step = x.size() == 3 ? x[2] : 1.0;
      if (step <= 0.0 || x[1] < x[0]) fail(section, key, fmt::format("bad range '{}'", boost::trim_copy(item)));
      const long count = std::lround(std::floor((x[1] - x[0]) / step + 1e-9));
      for (long i = 0; i <= count; ++i) out.push_back(x[0] + i * step);
    } else {
      fail(section, key, fmt::format("bad range '{}'", boost::trim_copy(item)));
    }
  }
  if (out.empty()) fail(section, key, "empty list");
  return out;
}

std::vector<std::string> IniFile::get_words(const std::string& section, const std::string& key,
                                            const std::vector<std::string>& fallback) const {
  auto v = raw(section, key);
  if (!v) return fallback;
  std::vector<std::string> items;
  boost::split(items, *v, boost::is_any_of(","));
  for (auto& s : items) {
    boost::trim(s);
    if (s.empty()) fail(section, key, "empty list entry");
  }
  return items;
}

void IniFile::reject_unread(const std::set<std::string>& sections) const {
  for (const auto& [k, line] : lines_) {
    if (k.second.empty() || !sections.count(k.first)) continue;
    if (!read_.count(k)) fail(k.first, k.second, "unknown field");
  }
}

std::string to_string(Command c) {
  switch (c) {
    case Command::curvature_check: return "curvature-check";
    case Command::frame_ode: return "frame-ode";
    case Command::system_residuals: return "system-residuals";
    case Command::carleman_verify: return "carleman-verify";
    case Command::uc_demo: return "uc-demo";
    case Command::diff_pipeline: return "diff-pipeline";
  }
  return "?";
}

const std::vector<Command>& all_commands() {
  static const std::vector<Command> c = {Command::curvature_check, Command::frame_ode,  Command::system_residuals,
                                         Command::carleman_verify, Command::uc_demo,    Command::diff_pipeline};
  return c;
}

std::optional<Command> parse_command(const std::string& s) {
  for (Command c : all_commands())
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::string section_of(Command c) {
  switch (c) {
    case Command::curvature_check: return "geometry";
    case Command::frame_ode: return "frame";
    case Command::system_residuals: return "system";
    case Command::carleman_verify: return "carleman";
    case Command::uc_demo: return "demo";
    case Command::diff_pipeline: return "diff";
  }
  return "";
}

CarlemanSettings::CarlemanSettings() {
  for (int l = 5; l <= 50; ++l) probe_lambdas.push_back(l);
}

namespace {

std::vector<int> as_ints(const IniFile& ini, const std::string& s, const std::string& k, const std::vector<int>& d) {
  std::vector<double> fallback(d.begin(), d.end());
  std::vector<int> out;
  for (double x : ini.get_list(s, k, fallback)) {
    if (x != std::floor(x)) ini.fail(s, k, fmt::format("expected integers, got {}", x));
    out.push_back(static_cast<int>(x));
  }
  return out;
}

uc::CarlemanParams read_params(const IniFile& ini, const std::string& s, uc::CarlemanParams p, int n) {
  p.n = n;
  p.delta = ini.get_double(s, "delta", p.delta);
  p.R = ini.get_double(s, "R", p.R);
  p.R0 = ini.get_double(s, "R0", p.R0);
  try {
    p.validate();
  } catch (const ConfigError& e) {
    ini.fail(s, ini.has(s, "delta") ? "delta" : ini.has(s, "R") ? "R" : "R0", e.what());
  }
  return p;
}

void read_sections(RunConfig& c, const IniFile& ini) {
  c.n = static_cast<int>(ini.get_int("run", "n", c.n));
  if (c.n < 2 || c.n > 6) ini.fail("run", "n", "dimension must be in [2, 6]");
  const long seed = ini.get_int("run", "seed", static_cast<long>(c.seed));
  if (seed < 0) ini.fail("run", "seed", "seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.jobs = static_cast<int>(ini.get_int("run", "jobs", c.jobs));
  if (c.jobs < 1) ini.fail("run", "jobs", "jobs must be positive");
  c.out = ini.get_string("run", "out", c.out.string());
  c.verbose = ini.get_bool("run", "verbose", c.verbose);

  switch (c.command) {
    case Command::curvature_check: {
      auto& g = c.geometry;
      g.dims = as_ints(ini, "geometry", "dims", g.dims);
      g.curvatures = ini.get_list("geometry", "curvatures", g.curvatures);
      g.points = static_cast<int>(ini.get_int("geometry", "points", g.points));
      if (g.points < 1) ini.fail("geometry", "points", "must be positive");
      g.point_radius = ini.get_double("geometry", "point_radius", g.point_radius);
      const std::string backend = ini.get_string("geometry", "backend", "analytic");
      if (backend == "analytic") {
        g.backend = uc::DiffBackend::analytic();
      } else if (backend == "finite_difference") {
        g.backend = uc::DiffBackend::finite_difference(ini.get_double("geometry", "h", 1e-4));
        if (!(g.backend.h > 0.0)) ini.fail("geometry", "h", "step must be positive");
      } else {
        ini.fail("geometry", "backend", fmt::format("unknown backend '{}'", backend));
      }
      g.compare_finite_difference = ini.get_bool("geometry", "compare_finite_difference", g.compare_finite_difference);
      break;
    }
    case Command::frame_ode: {
      auto& f = c.frame;
      f.presets = ini.get_words("frame", "presets", f.presets);
      for (const auto& p : f.presets)
        if (p != "sphere" && p != "hyperbolic" && p != "random" && p != "euclidean")
          ini.fail("frame", "presets", fmt::format("unknown preset '{}'", p));
      f.rays = static_cast<int>(ini.get_int("frame", "rays", f.rays));
      if (f.rays < 1) ini.fail("frame", "rays", "must be positive");
      f.radii = ini.get_list("frame", "radii", f.radii);
      for (double r : f.radii)
        if (!(r > 1e-3 && r <= 0.6)) ini.fail("frame", "radii", "radii must lie in (1e-3, 0.6]");
      f.jacobi_radii = ini.get_list("frame", "jacobi_radii", f.jacobi_radii);
      for (double r : f.jacobi_radii)
        if (!(r > 1e-3 && r <= 0.6)) ini.fail("frame", "jacobi_radii", "radii must lie in (1e-3, 0.6]");
      f.jacobi_rays = static_cast<int>(ini.get_int("frame", "jacobi_rays", f.jacobi_rays));
      f.oracle = ini.get_bool("frame", "oracle", f.oracle);
      f.jacobi = ini.get_bool("frame", "jacobi", f.jacobi);
      break;
    }
    case Command::system_residuals: {
      auto& s = c.system;
      s.dims = as_ints(ini, "system", "dims", s.dims);
      s.refinement_steps = ini.get_list("system", "refinement_steps", s.refinement_steps);
      if (s.refinement_steps.size() < 2) ini.fail("system", "refinement_steps", "need at least two steps");
      break;
    }
    case Command::carleman_verify: {
      auto& k = c.carleman;
      k.params = read_params(ini, "carleman", k.params, c.n);
      k.lemma2_lambdas = ini.get_list("carleman", "lambdas", k.lemma2_lambdas);
      k.probe_lambdas = ini.get_list("carleman", "probe_lambdas", k.probe_lambdas);
      k.corpus = ini.get_words("carleman", "corpus", k.corpus);
      k.probe_corpus = ini.get_words("carleman", "probe_corpus", k.probe_corpus);
      k.lemma2 = ini.get_bool("carleman", "lemma2", k.lemma2);
      k.probe = ini.get_bool("carleman", "probe", k.probe);
      for (double l : k.lemma2_lambdas)
        if (!(l > c.n)) ini.fail("carleman", "lambdas", fmt::format("lambda {} must exceed n = {}", l, c.n));
      break;
    }
    case Command::uc_demo: {
      auto& d = c.demo;
      d.params = read_params(ini, "demo", d.params, c.n);
      d.pair = ini.get_string("demo", "pair", d.pair);
      if (d.pair != "exp1" && d.pair != "r5" && d.pair != "zero")
        ini.fail("demo", "pair", fmt::format("unknown pair '{}'", d.pair));
      d.lambdas = ini.get_list("demo", "lambdas", d.lambdas);
      d.chain_lambdas = ini.get_list("demo", "chain_lambdas", d.chain_lambdas);
      for (double l : d.chain_lambdas)
        if (!(l > c.n)) ini.fail("demo", "chain_lambdas", fmt::format("lambda {} must exceed n = {}", l, c.n));
      d.k = static_cast<int>(ini.get_int("demo", "k", d.k));
      if (std::ldexp(1.0, -d.k) >= d.params.R) ini.fail("demo", "k", "2^-k must be below R");
      d.carleman_constant = ini.get_double("demo", "carleman_constant", d.carleman_constant);
      d.decay_ks = as_ints(ini, "demo", "decay_ks", d.decay_ks);
      d.decay_lambda = ini.get_double("demo", "decay_lambda", d.decay_lambda);
      if (!(d.decay_lambda > c.n)) ini.fail("demo", "decay_lambda", "lambda must exceed n");
      break;
    }
    case Command::diff_pipeline: {
      auto& d = c.diff;
      d.configurations = ini.get_words("diff", "configurations", d.configurations);
      for (const auto& s : d.configurations)
        if (s != "identical" && s != "rotated" && s != "perturbed")
          ini.fail("diff", "configurations", fmt::format("unknown configuration '{}'", s));
      d.curvature = ini.get_double("diff", "curvature", d.curvature);
      d.perturbed_curvature = ini.get_double("diff", "perturbed_curvature", d.perturbed_curvature);
      d.base = ini.get_list("diff", "base", d.base);
      if (static_cast<int>(d.base.size()) != c.n) ini.fail("diff", "base", "base point needs n coordinates");
      d.rotation_angle = ini.get_double("diff", "rotation_angle", d.rotation_angle);
      d.radius = ini.get_double("diff", "radius", d.radius);
      if (!(d.radius > 0.0 && d.radius <= 0.6)) ini.fail("diff", "radius", "radius must lie in (0, 0.6]");
      d.levels = static_cast<int>(ini.get_int("diff", "levels", d.levels));
      d.radial_nodes = static_cast<int>(ini.get_int("diff", "radial_nodes", d.radial_nodes));
      d.sphere_order = static_cast<int>(ini.get_int("diff", "sphere_order", d.sphere_order));
      break;
    }
  }
}

}  // namespace

RunConfig make_config(Command command, const IniFile* ini) {
  RunConfig c;
  c.command = command;
  if (ini) {
    read_sections(c, *ini);
    // Sections of other commands may be present; they are checked when those commands run.
    ini->reject_unread({"run", section_of(command)});
  }
  c.demo.params.n = c.n;
  c.carleman.params.n = c.n;
  return c;
}

void validate(const RunConfig& c) {
  if (c.jobs < 1) throw ConfigError("--jobs must be positive");
  if (c.command == Command::carleman_verify) c.carleman.params.validate();
  if (c.command == Command::uc_demo) c.demo.params.validate();
}

}  // namespace ucverify
