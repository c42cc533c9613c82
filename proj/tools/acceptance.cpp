#include "config.hpp"
#include "report.hpp"
#include "suites.hpp"

#include "CLI11.hpp"

#include <fmt/format.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>

namespace fs = std::filesystem;
using namespace ucverify;

namespace {

struct Criterion {
  int id;
  const char* title;
  std::function<SuiteResult()> run;
};

RunConfig defaults(Command c) { return make_config(c, nullptr); }

SuiteResult only(SuiteResult r, const std::string& prefix, bool keep) {
  std::deque<Check> kept;
  for (auto& c : r.checks)
    if ((c.name.rfind(prefix, 0) == 0) == keep) kept.push_back(c);
  r.checks = std::move(kept);
  return r;
}

std::string ucverify_path;
fs::path config_dir;

int run_process(const std::string& args, const fs::path& log) {
  const std::string cmd = fmt::format("\"{}\" {} > \"{}\" 2>&1", ucverify_path, args, log.string());
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Number of output files that differ between two runs, or -1 when the file sets differ.
long compare_dirs(const fs::path& a, const fs::path& b) {
  std::vector<std::string> names_a, names_b;
  for (const auto& e : fs::directory_iterator(a)) names_a.push_back(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b)) names_b.push_back(e.path().filename().string());
  std::sort(names_a.begin(), names_a.end());
  std::sort(names_b.begin(), names_b.end());
  if (names_a != names_b || names_a.empty()) return -1;
  long diff = 0;
  for (const auto& n : names_a) diff += slurp(a / n) != slurp(b / n);
  return diff;
}

SuiteResult plumbing() {
  SuiteResult r;
  r.command = "plumbing";
  const fs::path root = fs::temp_directory_path() / fmt::format("uc-acceptance-{}", ::getpid());
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string smoke = (config_dir / "smoke.ini").string();

  struct Run {
    const char* command;
    const char* extra;
  };
  // The second run of each pair uses two workers: output must not depend on scheduling.
  for (const Run& run : {Run{"curvature-check", ""}, Run{"frame-ode", ""}, Run{"carleman-verify", ""},
                         Run{"diff-pipeline", ""}}) {
    const fs::path a = root / fmt::format("{}-a", run.command), b = root / fmt::format("{}-b", run.command);
    const std::string base = fmt::format("{} --config \"{}\" --seed 11 {}", run.command, smoke, run.extra);
    const int ea = run_process(fmt::format("{} --out \"{}\"", base, a.string()), root / "log-a.txt");
    const int eb = run_process(fmt::format("{} --out \"{}\" --jobs 2", base, b.string()), root / "log-b.txt");
    const long d = compare_dirs(a, b);
    r.check(fmt::format("deterministic_{}", run.command), d == 0 && ea == eb && ea >= 0 && ea <= 1, double(d), 0.0,
            fmt::format("exit codes {} and {}", ea, eb));
  }
  // A different seed has to change the randomised output.
  {
    const fs::path a = root / "curvature-check-a", c = root / "seed";
    run_process(fmt::format("curvature-check --config \"{}\" --seed 12 --out \"{}\"", smoke, c.string()),
                root / "log-c.txt");
    const long d = compare_dirs(a, c);
    r.check("seed_changes_output", d > 0, double(d), 1.0, "lower bound on differing files");
  }
  {
    const int e = run_process(fmt::format("curvature-check --config \"{}\" --out \"{}\"",
                                          (config_dir / "failing.ini").string(), (root / "failing").string()),
                              root / "log-f.txt");
    r.check("failing_config_exit_status", e == 1, double(e), 1.0, "expected exit status 1");
    const int ok = run_process(fmt::format("system-residuals --config \"{}\" --out \"{}\"", smoke,
                                           (root / "passing").string()),
                               root / "log-p.txt");
    r.check("passing_config_exit_status", ok == 0, double(ok), 0.0, "expected exit status 0");
  }
  {
    const fs::path log = root / "log-i.txt";
    const int e = run_process(fmt::format("carleman-verify --config \"{}\" --out \"{}\"",
                                          (config_dir / "invalid.ini").string(), (root / "invalid").string()),
                              log);
    const std::string text = slurp(log);
    const bool located = text.find("invalid.ini:6: [carleman] delta") != std::string::npos;
    r.check("invalid_config_diagnostic", e == 2 && located, double(e), 2.0, "expected exit status 2 with line/field");
  }
  fs::remove_all(root);
  return r;
}

std::vector<Criterion> criteria() {
  return {
      {1, "curvature correctness", [] { return run_suite(defaults(Command::curvature_check)); }},
      {2, "frame ODE vs oracle",
       [] {
         auto c = defaults(Command::frame_ode);
         c.frame.jacobi = false;
         return run_suite(c);
       }},
      {3, "Jacobi closed form",
       [] {
         auto c = defaults(Command::frame_ode);
         c.frame.oracle = false;
         return run_suite(c);
       }},
      {4, "on-shell identity suite", [] { return run_suite(defaults(Command::system_residuals)); }},
      {5, "weighted Hardy inequality",
       [] {
         auto c = defaults(Command::carleman_verify);
         c.carleman.probe = false;
         return run_suite(c);
       }},
      {6, "Carleman probe",
       [] {
         auto c = defaults(Command::carleman_verify);
         c.carleman.lemma2 = false;
         return run_suite(c);
       }},
      {7, "mechanism contrast",
       [] { return only(run_suite(defaults(Command::uc_demo)), "chain_", false); }},
      {8, "difference pipeline", [] { return run_suite(defaults(Command::diff_pipeline)); }},
      {9, "determinism and exit codes", plumbing},
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int selected = 0;
  bool verbose = false;
  ucverify_path = UCVERIFY_PATH;
  std::string configs = UC_CONFIG_DIR;
  app.add_option("--criterion", selected, "run one criterion (1-9); all when omitted")->check(CLI::Range(1, 9));
  app.add_option("--ucverify", ucverify_path, "ucverify executable for criterion 9");
  app.add_option("--configs", configs, "directory with the shipped configs");
  app.add_flag("--verbose", verbose, "print every check");
  CLI11_PARSE(app, argc, argv);
  config_dir = configs;

  int failed = 0;
  for (const auto& c : criteria()) {
    if (selected && c.id != selected) continue;
    SuiteResult r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.check("error", false, 0.0, 0.0, e.what());
    }
    const bool pass = r.passed() && !r.checks.empty();
    std::string detail = fmt::format("{}/{} checks", r.checks.size() - r.failures(), r.checks.size());
    for (const auto& k : r.checks)
      if (!k.pass)
        detail += fmt::format("; {} = {} (tolerance {})", k.name, format_number(k.value), format_number(k.tolerance));
    std::printf("criterion %d %s: %s [%s]\n", c.id, pass ? "PASS" : "FAIL", c.title, detail.c_str());
    if (verbose) {
      for (const auto& k : r.checks)
        std::printf("  %s %-44s value %s tolerance %s %s\n", k.pass ? "pass" : "FAIL", k.name.c_str(),
                    format_number(k.value).c_str(), format_number(k.tolerance).c_str(), k.detail.c_str());
    }
    std::fflush(stdout);
    failed += !pass;
  }
  return failed == 0 ? 0 : 1;
}
