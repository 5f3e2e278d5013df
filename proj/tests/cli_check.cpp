// Drives the installed CLI binary end to end: exit codes, the json
// determinism contract, and machine-readable error names on stderr.
// Usage: cli_check <path-to-otbag-binary>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "otbag/data.hpp"
#include "otbag/harness.hpp"

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void expect(bool condition, const std::string& label) {
  std::cout << (condition ? "[ok] " : "[FAIL] ") << label << '\n';
  if (!condition) ++g_failures;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int run_command(const std::string& command) {
  const int status = std::system(command.c_str());
  return status == -1 ? -1 : WEXITSTATUS(status);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: cli_check <otbag-binary>\n";
    return 2;
  }
  const std::string binary = argv[1];
  const fs::path dir =
      fs::temp_directory_path() / ("otbag-cli-check-" + std::to_string(::getpid()));
  fs::create_directories(dir);

  using namespace otbag;
  const SyntheticSpec spec{SyntheticKind::aligned, 4, 80, 40, 40, 3.0};
  const TransferTask task = make_synthetic_task(spec, 123);
  Dataset target = task.target_train;
  target.instances.insert(target.instances.end(),
                          task.target_test.instances.begin(),
                          task.target_test.instances.end());
  save_dense_csv(task.source, dir / "source.csv", CsvOptions{});
  save_dense_csv(target, dir / "target.csv", CsvOptions{});

  const std::string base_cmd =
      binary + " run --source " + (dir / "source.csv").string() + " --target " +
      (dir / "target.csv").string() +
      " --reps 4 --m 5 --alpha 4 --seed 3 --report json";

  const int rc1 =
      run_command(base_cmd + " --out " + (dir / "r1.json").string());
  const int rc2 =
      run_command(base_cmd + " --out " + (dir / "r2.json").string());
  expect(rc1 == 0 && rc2 == 0, "run exits 0 on success");

  const std::string first = read_file(dir / "r1.json");
  const std::string second = read_file(dir / "r2.json");
  expect(!first.empty(), "json report is nonempty");
  expect(first == second, "two identical runs give byte-identical json");

  // Config file + flag override: overriding the seed must change the report.
  std::ofstream(dir / "config.json")
      << config_to_json_text([&] {
           ExperimentConfig config;
           config.source_path = (dir / "source.csv").string();
           config.target_path = (dir / "target.csv").string();
           config.repetitions = 4;
           config.members = 5;
           config.alpha = 4;
           config.base_seed = 3;
           return config;
         }());
  const int rc3 = run_command(binary + " run --config " +
                              (dir / "config.json").string() + " --report json --out " +
                              (dir / "r3.json").string());
  expect(rc3 == 0, "run --config exits 0");
  expect(read_file(dir / "r3.json") == first, "config file reproduces the flags");

  const int rc4 = run_command(binary + " run --config " +
                              (dir / "config.json").string() +
                              " --seed 4 --report json --out " +
                              (dir / "r4.json").string());
  expect(rc4 == 0 && read_file(dir / "r4.json") != first,
         "explicit flag overrides the config file");

  // Failure path: missing file -> nonzero exit, error name on stderr.
  const int rc5 = run_command(binary + " run --source " +
                              (dir / "missing.csv").string() + " --target " +
                              (dir / "target.csv").string() + " 2> " +
                              (dir / "err.txt").string());
  const std::string err = read_file(dir / "err.txt");
  expect(rc5 != 0, "missing input exits nonzero");
  expect(err.find("IoError") != std::string::npos,
         "stderr names the error code");

  // synth subcommand smoke run.
  const int rc6 = run_command(
      binary +
      " synth --kind aligned --d 4 --n-source 50 --n-target 20 --n-test 20 "
      "--reps 2 --m 3 --alpha 2 --baseline --report table --out " +
      (dir / "synth.txt").string());
  expect(rc6 == 0, "synth exits 0");
  expect(read_file(dir / "synth.txt").find("target-only") != std::string::npos,
         "baseline row present with --baseline");

  std::error_code ec;
  fs::remove_all(dir, ec);

  std::cout << (g_failures == 0 ? "cli_check passed\n" : "cli_check FAILED\n");
  return g_failures == 0 ? 0 : 1;
}
