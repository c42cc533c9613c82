#pragma once

#include "uc/carleman.hpp"
#include "uc/metric_field.hpp"

#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ucverify {

// Flat INI file with [section] headers. Getters record which keys were read so
// that leftovers can be reported as unknown fields.
class IniFile {
 public:
  static IniFile load(const std::filesystem::path& path);
  static IniFile parse(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> raw(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long get_int(const std::string& section, const std::string& key, long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  // Comma-separated values; "a:b" and "a:b:step" expand to inclusive ranges.
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               const std::vector<double>& fallback) const;
  std::vector<std::string> get_words(const std::string& section, const std::string& key,
                                     const std::vector<std::string>& fallback) const;

  // Throws ConfigError naming the first key in `sections` that no getter asked for.
  void reject_unread(const std::set<std::string>& sections) const;
  // "file:line: [section] key" for diagnostics.
  std::string where(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& message) const;

 private:
  boost::property_tree::ptree tree_;
  std::string origin_;
  std::map<std::pair<std::string, std::string>, int> lines_;
  mutable std::set<std::pair<std::string, std::string>> read_;
};

enum class Command { curvature_check, frame_ode, system_residuals, carleman_verify, uc_demo, diff_pipeline };

std::string to_string(Command c);
// The config section a command reads besides [run].
std::string section_of(Command c);
std::optional<Command> parse_command(const std::string& s);
const std::vector<Command>& all_commands();

struct GeometrySettings {
  std::vector<int> dims = {3, 4};
  std::vector<double> curvatures = {1.0, -1.0};
  int points = 100;
  double point_radius = 0.5;
  uc::DiffBackend backend = uc::DiffBackend::analytic();
  bool compare_finite_difference = true;
};

struct FrameSettings {
  std::vector<std::string> presets = {"sphere", "hyperbolic", "random"};
  int rays = 100;
  std::vector<double> radii = {0.25, 0.5};
  std::vector<double> jacobi_radii = {0.1, 0.3, 0.5};
  int jacobi_rays = 10;
  bool oracle = true;
  bool jacobi = true;
};

struct SystemSettings {
  std::vector<int> dims = {3, 4};
  std::vector<double> refinement_steps = {2e-2, 1e-2, 5e-3};
};

struct CarlemanSettings {
  uc::CarlemanParams params;
  std::vector<double> lemma2_lambdas = {4, 8, 16, 32, 64};
  std::vector<double> probe_lambdas;  // default 5..50
  std::vector<std::string> corpus;    // empty: all members
  std::vector<std::string> probe_corpus;
  bool lemma2 = true;
  bool probe = true;
  CarlemanSettings();
};

struct DemoSettings {
  uc::CarlemanParams params;
  std::string pair = "exp1";
  std::vector<double> lambdas = {10, 20, 30, 40, 50, 60};
  std::vector<double> chain_lambdas = {10, 20, 40, 60};
  int k = 6;
  double carleman_constant = 25.0;
  std::vector<int> decay_ks = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  double decay_lambda = 10.0;
};

struct DiffSettings {
  std::vector<std::string> configurations = {"identical", "rotated", "perturbed"};
  double curvature = 1.0;
  double perturbed_curvature = 1.1;
  std::vector<double> base = {0.1, -0.05, 0.08};
  double rotation_angle = 0.7;
  double radius = 0.4;
  int levels = 2;
  int radial_nodes = 2;
  int sphere_order = 4;
};

struct RunConfig {
  Command command = Command::curvature_check;
  int n = 3;
  std::uint64_t seed = 20240601;
  int jobs = 1;
  bool verbose = false;
  std::filesystem::path out = "ucverify-out";

  GeometrySettings geometry;
  FrameSettings frame;
  SystemSettings system;
  CarlemanSettings carleman;
  DemoSettings demo;
  DiffSettings diff;
};

// Defaults for `command`, overridden by the sections of `ini` that the command
// reads; other sections and unknown keys are errors.
RunConfig make_config(Command command, const IniFile* ini);
void validate(const RunConfig& c);

}  // namespace ucverify
