#pragma once

// Scenario descriptions, their JSON form, and the gen/run pipeline behind the
// command line tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qcs/filter_config.hpp"
#include "qcs/quadratic_reconstruction.hpp"
#include "qcs/scattering_model.hpp"
#include "qcs/types.hpp"

namespace qcs {

enum class ScenarioKind { chain_1d, grid_2d, random_2d, custom };

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& text);

struct SiteAmplitude {
  Index index = 0;  // flat, row-major
  double modulus = 0.0;
  double phase = 0.0;  // radians
};

struct ScenarioSpec {
  std::string name;
  ScenarioKind kind = ScenarioKind::custom;
  GridShape shape;
  Index multiplicity = 1;
  std::vector<SiteAmplitude> scatterers;
  std::vector<SiteAmplitude> parasitics;
  // random_2d: number of scatterers drawn from `seed`.
  Index random_count = 0;
  LeakageSpec leakage;  // support is taken from the truth, not stored
  FilterConfig filter;
  std::uint64_t seed = 0;
  // Measured intensities, relative to the scenario file. When absent the
  // noiseless forward model of the truth is used.
  std::optional<std::string> intensities_file;

  /// Throws DomainError for out-of-range or duplicate sites and bad settings.
  void validate() const;
};

inline const std::vector<std::string>& builtin_scenario_names() {
  static const std::vector<std::string> names{"paper-1d", "paper-2d", "paper-2d-noparasitic",
                                              "paper-2d-random"};
  return names;
}

/// Fully populated builtin scenario. Throws DomainError for unknown names.
ScenarioSpec scenario_builtin(const std::string& name);

/// Draws the scatterers of a random_2d scenario: distinct sites, Gaussian
/// real amplitudes normalized to unit l2 norm.
std::vector<SiteAmplitude> random_scatterers(const GridShape& shape, Index count,
                                             std::uint64_t seed);

/// JSON round trip. Parsing throws DomainError on malformed input.
std::string scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const std::string& text);

/// Everything a reconstruction needs, derived from a spec.
struct Problem {
  GridShape shape;
  SensorFamily sensors;
  CVector truth;
  RVector measured;
  CVector x0;
};

/// Builds truth, sensors, measurements and the leakage initial guess.
/// `base_dir` resolves a relative intensities_file.
Problem prepare_problem(const ScenarioSpec& spec,
                        const std::filesystem::path& base_dir = std::filesystem::path{});

/// Intensity CSV (header plus one row per sensor).
std::string intensities_to_csv(const RVector& values, const GridShape& shape);
RVector intensities_from_csv(const std::string& text, Index expected);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// `gen`: scenario.json and intensities.csv in out_dir. The written scenario
/// points at the written intensities.
void cmd_gen(const ScenarioSpec& spec, const std::filesystem::path& out_dir);

struct RunOptions {
  std::optional<Index> max_iter;
  std::optional<std::uint64_t> seed;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitMalformed = 1;
inline constexpr int kExitDivergence = 2;

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;
};

/// `run`: report.json, sites.csv and trace.csv in out_dir. Never throws for
/// malformed scenarios or divergence; those map to exit codes 1 and 2.
RunOutcome cmd_run(const std::filesystem::path& scenario_path,
                   const std::filesystem::path& out_dir, const RunOptions& options = {});

inline constexpr const char* kReportSchema = "qcs-report/1";
inline constexpr const char* kScenarioSchema = "qcs-scenario/1";

/// Schema check of a report. Returns the list of problems (empty when valid).
std::vector<std::string> validate_report(const std::string& json_text);

}  // namespace qcs
