// Command line front end: gen / run / verify.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qcs/experiment.hpp"
#include "qcs/verify.hpp"

namespace fs = std::filesystem;

namespace {

bool is_builtin(const std::string& name) {
  for (const auto& b : qcs::builtin_scenario_names())
    if (b == name) return true;
  return false;
}

int do_gen(const std::string& source, const std::string& out_dir) {
  try {
    qcs::ScenarioSpec spec = is_builtin(source)
                                 ? qcs::scenario_builtin(source)
                                 : qcs::scenario_from_json(qcs::read_file(source));
    qcs::cmd_gen(spec, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "gen: " << e.what() << "\n";
    return qcs::kExitMalformed;
  }
  std::cout << "wrote " << (fs::path(out_dir) / "scenario.json").string() << " and "
            << (fs::path(out_dir) / "intensities.csv").string() << "\n";
  return qcs::kExitOk;
}

int do_run(const std::string& file, const std::string& out_dir, std::optional<long long> max_iter,
           std::optional<unsigned long long> seed) {
  qcs::RunOptions opt;
  if (max_iter) opt.max_iter = static_cast<qcs::Index>(*max_iter);
  if (seed) opt.seed = static_cast<std::uint64_t>(*seed);
  const qcs::RunOutcome out = qcs::cmd_run(file, out_dir, opt);
  if (out.exit_code == qcs::kExitOk) {
    std::cout << "run: " << out.message << "\n";
  } else {
    std::cerr << "run: " << out.message << "\n";
  }
  return out.exit_code;
}

int do_verify(int seeds, bool break_sensor) {
  qcs::VerifyOptions opt;
  opt.seeds = seeds;
  if (break_sensor) opt.sensor = qcs::broken_toeplitz_matrix;
  bool all = true;
  try {
    for (const auto& r : qcs::run_verify(opt)) {
      std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
      all = all && r.passed;
    }
  } catch (const std::exception& e) {
    std::cerr << "verify: " << e.what() << "\n";
    return qcs::kExitMalformed;
  }
  return all ? qcs::kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse amplitude recovery from Fourier intensities"};
  app.require_subcommand(1);

  std::string gen_source, gen_out;
  auto* gen = app.add_subcommand("gen", "Write a scenario and its noiseless intensities");
  gen->add_option("source", gen_source, "Builtin name or scenario JSON file")->required();
  gen->add_option("-o,--out", gen_out, "Output directory")->required();

  std::string run_file, run_out;
  std::optional<long long> max_iter;
  std::optional<unsigned long long> seed;
  auto* run = app.add_subcommand("run", "Reconstruct a scenario");
  run->add_option("file", run_file, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", run_out, "Output directory")->required();
  run->add_option("--max-iter", max_iter, "Override the iteration budget")->check(CLI::NonNegativeNumber);
  run->add_option("--seed", seed, "Override the scenario seed");

  int seeds = 100;
  bool break_sensor = false;
  auto* verify = app.add_subcommand("verify", "Run the self-check suites");
  verify->add_option("--seeds", seeds, "Random instances per suite")->check(CLI::PositiveNumber);
  verify->add_flag("--break-sensor", break_sensor, "Inject a wrong sensor (negative control)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qcs::kExitMalformed;
  }

  if (*gen) return do_gen(gen_source, gen_out);
  if (*run) return do_run(run_file, run_out, max_iter, seed);
  return do_verify(seeds, break_sensor);
}
