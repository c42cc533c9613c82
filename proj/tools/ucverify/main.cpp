#include "config.hpp"
#include "report.hpp"
#include "suites.hpp"

#include "uc/error.hpp"

#include "CLI11.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cstdio>
#include <optional>

namespace {

// Exit codes.
constexpr int kPass = 0;
constexpr int kChecksFailed = 1;
constexpr int kBadConfig = 2;
constexpr int kInternal = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace ucverify;
  CLI::App app{"Numerical checks for the unique continuation machinery"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  bool verbose = false;
  app.add_option("--config", config_path, "INI file with run parameters")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "directory for CSV tables and the summary");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--verbose", verbose, "print every check");

  const std::vector<std::pair<Command, const char*>> help = {
      {Command::curvature_check, "Ricci and symmetry residuals on constant-curvature presets"},
      {Command::frame_ode, "frame transport ODE against the shooting oracle"},
      {Command::system_residuals, "Einstein-scalar identities on exact and manufactured solutions"},
      {Command::carleman_verify, "weighted Hardy inequality and Carleman probe sweeps"},
      {Command::uc_demo, "absorption chain, bounded-vs-divergent contrast, cutoff decay"},
      {Command::diff_pipeline, "difference of two solutions in normal coordinates"},
  };
  for (const auto& [cmd, text] : help) app.add_subcommand(to_string(cmd), text);

  CLI11_PARSE(app, argc, argv);
  const Command command = *parse_command(app.get_subcommands().front()->get_name());

  RunConfig cfg;
  try {
    std::optional<IniFile> ini;
    if (!config_path.empty()) ini = IniFile::load(config_path);
    cfg = make_config(command, ini ? &*ini : nullptr);
    if (seed) cfg.seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    if (!out_dir.empty()) cfg.out = out_dir;
    cfg.verbose = cfg.verbose || verbose;
    validate(cfg);
  } catch (const uc::ConfigError& e) {
    std::fprintf(stderr, "ucverify: invalid config: %s\n", e.what());
    return kBadConfig;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    SuiteResult result = run_suite(cfg);
    write_outputs(result, cfg.out);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    for (const auto& line : result.log)
      if (cfg.verbose) std::printf("note: %s\n", line.c_str());
    for (const auto& c : result.checks) {
      if (!cfg.verbose && c.pass) continue;
      std::printf("%s %-44s value %s tolerance %s%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                  format_number(c.value).c_str(), format_number(c.tolerance).c_str(), c.detail.empty() ? "" : "  ",
                  c.detail.c_str());
    }
    std::printf("%s: %zu checks, %d failed (%.1f s); output in %s\n", result.command.c_str(), result.checks.size(),
                result.failures(), seconds, cfg.out.string().c_str());
    return result.passed() ? kPass : kChecksFailed;
  } catch (const uc::ConfigError& e) {
    std::fprintf(stderr, "ucverify: invalid config: %s\n", e.what());
    return kBadConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ucverify: %s\n", e.what());
    return kInternal;
  }
}
