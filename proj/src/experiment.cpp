#include "qcs/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "qcs/random.hpp"

namespace qcs {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double principal_phase(Complex z) { return std::arg(z); }

void check_sites(const std::vector<SiteAmplitude>& sites, const GridShape& shape,
                 std::set<Index>& seen, const char* what) {
  for (const auto& s : sites) {
    if (s.index < 0 || s.index >= shape.size()) {
      throw DomainError(std::string("scenario: ") + what + " site outside the grid");
    }
    if (!seen.insert(s.index).second) {
      throw DomainError(std::string("scenario: ") + what + " site listed twice");
    }
    if (!std::isfinite(s.modulus) || !std::isfinite(s.phase) || !(s.modulus > 0.0)) {
      throw DomainError(std::string("scenario: ") + what + " modulus must be positive");
    }
  }
}

std::vector<SiteAmplitude> block_pattern(const GridShape& shape) {
  // 5x5 block of concentric rings, centre at (6, 12).
  const double ring_modulus[] = {0.56, 0.28, 0.12};
  std::vector<SiteAmplitude> sites;
  for (Index r = 4; r <= 8; ++r) {
    for (Index c = 10; c <= 14; ++c) {
      const Index ring = std::max(std::abs(r - 6), std::abs(c - 12));
      sites.push_back({flatten_index(shape, r, c), ring_modulus[ring], 0.0});
    }
  }
  return sites;
}

// --- JSON helpers -----------------------------------------------------------

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw DomainError(std::string("scenario: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw DomainError(std::string("scenario: field '") + key + "' has the wrong type");
  }
}

template <typename T>
T optional_field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw DomainError(std::string("scenario: field '") + key + "' has the wrong type");
  }
}

json sites_to_json(const std::vector<SiteAmplitude>& sites, const GridShape& shape) {
  json out = json::array();
  for (const auto& s : sites) {
    json e;
    if (shape.is_line()) {
      e["index"] = s.index;
    } else {
      const auto [r, c] = unflatten_index(shape, s.index);
      e["row"] = r;
      e["col"] = c;
    }
    e["modulus"] = s.modulus;
    e["phase"] = s.phase;
    out.push_back(e);
  }
  return out;
}

std::vector<SiteAmplitude> sites_from_json(const json& j, const GridShape& shape) {
  if (!j.is_array()) throw DomainError("scenario: site list must be an array");
  std::vector<SiteAmplitude> out;
  for (const auto& e : j) {
    if (!e.is_object()) throw DomainError("scenario: site entries must be objects");
    SiteAmplitude s;
    if (e.contains("index")) {
      s.index = require<Index>(e, "index");
    } else {
      const auto r = require<Index>(e, "row");
      const auto c = require<Index>(e, "col");
      if (r < 0 || r >= shape.rows || c < 0 || c >= shape.cols) {
        throw DomainError("scenario: site outside the grid");
      }
      s.index = r * shape.cols + c;
    }
    s.modulus = require<double>(e, "modulus");
    s.phase = optional_field<double>(e, "phase", 0.0);
    out.push_back(s);
  }
  return out;
}

json filter_to_json(const FilterConfig& f) {
  return json{{"p0_scale", f.p0_scale},
              {"q_scale", f.q_scale},
              {"r_obs", f.r_obs},
              {"r_l1", f.r_l1},
              {"gamma", {{"a", f.schedule.a}, {"b", f.schedule.b}}},
              {"max_iter", f.max_iter},
              {"eps_phase", f.eps_phase}};
}

FilterConfig filter_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("scenario: 'filter' must be an object");
  FilterConfig f;
  f.p0_scale = require<double>(j, "p0_scale");
  f.q_scale = require<double>(j, "q_scale");
  f.r_obs = require<double>(j, "r_obs");
  f.r_l1 = require<double>(j, "r_l1");
  const json& g = j.contains("gamma") ? j.at("gamma") : json::object();
  if (!g.is_object()) throw DomainError("scenario: 'gamma' must be an object");
  f.schedule.a = require<double>(g, "a");
  f.schedule.b = require<double>(g, "b");
  f.max_iter = require<Index>(j, "max_iter");
  f.eps_phase = optional_field<double>(j, "eps_phase", kDefaultPhaseEpsilon);
  return f;
}

CVector truth_vector(const ScenarioSpec& spec) {
  CVector x = CVector::Zero(spec.shape.size());
  for (const auto* list : {&spec.scatterers, &spec.parasitics}) {
    for (const auto& s : *list) x(s.index) = std::polar(s.modulus, s.phase);
  }
  return x;
}

SensorFamily sensors_for(const ScenarioSpec& spec) {
  if (spec.shape.is_line() && spec.multiplicity == 1) return SensorFamily::line(spec.shape.cols);
  return SensorFamily::grid(spec.shape.rows, spec.shape.cols, spec.multiplicity);
}

std::string sites_csv(const CVector& truth, const CVector& est_in_truth_frame, double threshold) {
  std::string out = "site_index,true_modulus,true_phase,est_modulus,est_phase,on_support\n";
  for (Index j = 0; j < truth.size(); ++j) {
    const double tm = std::abs(truth(j));
    const double em = std::abs(est_in_truth_frame(j));
    out += std::to_string(j) + "," + fmt17(tm) + "," + fmt17(tm > 0.0 ? std::arg(truth(j)) : 0.0) +
           "," + fmt17(em) + "," + fmt17(std::arg(est_in_truth_frame(j))) + "," +
           (em >= threshold ? "true" : "false") + "\n";
  }
  return out;
}

std::string trace_csv(const ReconstructionTrace& t) {
  std::string out = "iter,l1_true,l1_linearized,max_intensity_residual,gamma\n";
  for (std::size_t k = 0; k < t.l1_true.size(); ++k) {
    out += std::to_string(k + 1) + "," + fmt17(t.l1_true[k]) + "," + fmt17(t.l1_linearized[k]) +
           "," + fmt17(t.intensity_residual_max[k]) + "," + fmt17(t.gamma[k]) + "\n";
  }
  return out;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::chain_1d: return "chain_1d";
    case ScenarioKind::grid_2d: return "grid_2d";
    case ScenarioKind::random_2d: return "random_2d";
    case ScenarioKind::custom: return "custom";
  }
  return "custom";
}

ScenarioKind parse_scenario_kind(const std::string& text) {
  if (text == "chain_1d") return ScenarioKind::chain_1d;
  if (text == "grid_2d") return ScenarioKind::grid_2d;
  if (text == "random_2d") return ScenarioKind::random_2d;
  if (text == "custom") return ScenarioKind::custom;
  throw DomainError("scenario: unknown kind '" + text + "'");
}

void ScenarioSpec::validate() const {
  if (shape.rows <= 0 || shape.cols <= 0) throw DomainError("scenario: grid extents must be positive");
  if (multiplicity <= 0) throw DomainError("scenario: multiplicity must be positive");
  if (kind == ScenarioKind::chain_1d && !shape.is_line()) {
    throw DomainError("scenario: chain_1d needs a single row");
  }
  if (kind == ScenarioKind::random_2d) {
    if (random_count <= 0 || random_count > shape.size()) {
      throw DomainError("scenario: random count must lie in [1, grid size]");
    }
  }
  std::set<Index> seen;
  check_sites(scatterers, shape, seen, "scatterer");
  check_sites(parasitics, shape, seen, "parasitic");
  if (seen.empty()) throw DomainError("scenario: no scatterers");
  LeakageSpec probe = leakage;
  probe.support.assign(seen.begin(), seen.end());
  probe.validate();
  filter.validate();
}

std::vector<SiteAmplitude> random_scatterers(const GridShape& shape, Index count,
                                             std::uint64_t seed) {
  if (count <= 0 || count > shape.size()) throw DomainError("random scatterers: bad count");
  Rng rng(seed);
  std::vector<Index> sites(static_cast<std::size_t>(shape.size()));
  for (Index i = 0; i < shape.size(); ++i) sites[static_cast<std::size_t>(i)] = i;
  // Partial Fisher-Yates: the first `count` entries are a uniform sample.
  for (Index i = 0; i < count; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(shape.size() - i)));
    std::swap(sites[static_cast<std::size_t>(i)], sites[static_cast<std::size_t>(j)]);
  }
  std::vector<double> amp(static_cast<std::size_t>(count));
  double norm_sq = 0.0;
  for (auto& a : amp) {
    do {
      a = rng.normal();
    } while (a == 0.0);
    norm_sq += a * a;
  }
  const double norm = std::sqrt(norm_sq);
  std::vector<SiteAmplitude> out;
  for (Index i = 0; i < count; ++i) {
    const double a = amp[static_cast<std::size_t>(i)] / norm;
    out.push_back({sites[static_cast<std::size_t>(i)], std::abs(a), a < 0.0 ? kPi : 0.0});
  }
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.index < r.index; });
  return out;
}

ScenarioSpec scenario_builtin(const std::string& name) {
  ScenarioSpec spec;
  spec.name = name;
  spec.leakage.shift = 0.3;
  spec.leakage.modulus_scale = 0.6;
  spec.leakage.phase_scale = 1.1;

  if (name == "paper-1d") {
    spec.kind = ScenarioKind::chain_1d;
    spec.shape = GridShape::line(117);
    const double phases[] = {-kPi / 3, -kPi / 6, 0.0, kPi / 6, kPi / 3, kPi / 2};
    for (Index i = 0; i < 6; ++i) spec.scatterers.push_back({50 + i, 1.0, phases[i]});
    spec.parasitics = {{5, 0.23, 0.0}, {110, 0.42, 0.0}};
    spec.filter = FilterConfig{};  // 0.3, 1e-8, 1e-4, 1e-6, (0.1, 0.0019), 1200
    return spec;
  }

  spec.shape = GridShape::grid(12, 25);
  spec.filter.q_scale = 1e-7;
  spec.filter.schedule = {0.17, 0.0028};
  spec.filter.max_iter = 2000;

  if (name == "paper-2d" || name == "paper-2d-noparasitic") {
    spec.kind = ScenarioKind::grid_2d;
    spec.scatterers = block_pattern(spec.shape);
    if (name == "paper-2d") {
      spec.parasitics = {{flatten_index(spec.shape, 1, 3), 0.23, 0.0},
                         {flatten_index(spec.shape, 10, 20), 0.42, 0.0}};
    } else {
      spec.filter.schedule = {0.17, 0.0012};
      spec.filter.max_iter = 5000;
    }
    return spec;
  }
  if (name == "paper-2d-random") {
    spec.kind = ScenarioKind::random_2d;
    spec.random_count = 25;
    spec.seed = 1;
    spec.scatterers = random_scatterers(spec.shape, spec.random_count, spec.seed);
    spec.filter.schedule = {0.17, 0.0058};
    spec.filter.max_iter = 1000;
    return spec;
  }
  throw DomainError("unknown builtin scenario '" + name + "'");
}

std::string scenario_to_json(const ScenarioSpec& spec) {
  json j;
  j["schema"] = kScenarioSchema;
  j["name"] = spec.name;
  j["kind"] = to_string(spec.kind);
  j["grid"] = {{"rows", spec.shape.rows}, {"cols", spec.shape.cols}};
  j["multiplicity"] = spec.multiplicity;
  j["seed"] = spec.seed;
  if (spec.kind == ScenarioKind::random_2d) j["random_count"] = spec.random_count;
  j["scatterers"] = sites_to_json(spec.scatterers, spec.shape);
  j["parasitics"] = sites_to_json(spec.parasitics, spec.shape);
  j["leakage"] = {{"shift", spec.leakage.shift},
                  {"modulus_scale", spec.leakage.modulus_scale},
                  {"phase_scale", spec.leakage.phase_scale}};
  j["filter"] = filter_to_json(spec.filter);
  if (spec.intensities_file) j["intensities_file"] = *spec.intensities_file;
  return j.dump(2) + "\n";
}

ScenarioSpec scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("scenario: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DomainError("scenario: top level must be an object");
  const auto schema = optional_field<std::string>(j, "schema", kScenarioSchema);
  if (schema != kScenarioSchema) throw DomainError("scenario: unsupported schema '" + schema + "'");

  ScenarioSpec spec;
  spec.name = optional_field<std::string>(j, "name", "custom");
  spec.kind = parse_scenario_kind(optional_field<std::string>(j, "kind", "custom"));
  if (!j.contains("grid") || !j.at("grid").is_object()) {
    throw DomainError("scenario: missing object 'grid'");
  }
  spec.shape.rows = optional_field<Index>(j.at("grid"), "rows", 1);
  spec.shape.cols = require<Index>(j.at("grid"), "cols");
  if (spec.shape.rows <= 0 || spec.shape.cols <= 0) {
    throw DomainError("scenario: grid extents must be positive");
  }
  spec.multiplicity = optional_field<Index>(j, "multiplicity", 1);
  spec.seed = optional_field<std::uint64_t>(j, "seed", 0);
  spec.random_count = optional_field<Index>(j, "random_count", 0);
  spec.scatterers = sites_from_json(optional_field<json>(j, "scatterers", json::array()), spec.shape);
  spec.parasitics = sites_from_json(optional_field<json>(j, "parasitics", json::array()), spec.shape);

  if (spec.kind == ScenarioKind::random_2d) {
    if (spec.random_count <= 0 || spec.random_count > spec.shape.size()) {
      throw DomainError("scenario: random count must lie in [1, grid size]");
    }
    const auto drawn = random_scatterers(spec.shape, spec.random_count, spec.seed);
    if (!spec.scatterers.empty()) {
      // Listed scatterers are an audit copy; they must agree with the seed.
      bool same = spec.scatterers.size() == drawn.size();
      for (std::size_t i = 0; same && i < drawn.size(); ++i) {
        same = spec.scatterers[i].index == drawn[i].index &&
               std::abs(spec.scatterers[i].modulus - drawn[i].modulus) <= 1e-15 &&
               std::abs(spec.scatterers[i].phase - drawn[i].phase) <= 1e-15;
      }
      if (!same) throw DomainError("scenario: listed scatterers do not match the seed");
    }
    spec.scatterers = drawn;
  }

  const json leak = optional_field<json>(j, "leakage", json::object());
  spec.leakage.shift = optional_field<double>(leak, "shift", 0.0);
  spec.leakage.modulus_scale = optional_field<double>(leak, "modulus_scale", 1.0);
  spec.leakage.phase_scale = optional_field<double>(leak, "phase_scale", 1.0);
  spec.filter = filter_from_json(require<json>(j, "filter"));
  if (j.contains("intensities_file")) {
    spec.intensities_file = require<std::string>(j, "intensities_file");
  }
  spec.validate();
  return spec;
}

Problem prepare_problem(const ScenarioSpec& spec, const fs::path& base_dir) {
  spec.validate();
  SensorFamily sensors = sensors_for(spec);
  CVector truth = truth_vector(spec);

  RVector measured;
  if (spec.intensities_file) {
    fs::path p(*spec.intensities_file);
    if (p.is_relative()) p = base_dir / p;
    measured = intensities_from_csv(read_file(p), sensors.size());
  } else {
    measured = sensors.intensities(truth);
  }

  LeakageSpec leakage = spec.leakage;
  leakage.support.clear();
  for (Index j = 0; j < truth.size(); ++j) {
    if (truth(j) != Complex{0.0, 0.0}) leakage.support.push_back(j);
  }
  CVector x0 = build_initial_guess(truth, leakage, spec.shape);
  return Problem{spec.shape, std::move(sensors), std::move(truth), std::move(measured), std::move(x0)};
}

std::string intensities_to_csv(const RVector& values, const GridShape& shape) {
  if (values.size() != shape.size()) throw DimensionError("intensity csv: length does not match grid");
  std::string out = shape.is_line() ? "sensor,intensity\n" : "r1,r2,intensity\n";
  for (Index j = 0; j < values.size(); ++j) {
    if (shape.is_line()) {
      out += std::to_string(j);
    } else {
      const auto [r1, r2] = unflatten_index(shape, j);
      out += std::to_string(r1) + "," + std::to_string(r2);
    }
    out += "," + fmt17(values(j)) + "\n";
  }
  return out;
}

RVector intensities_from_csv(const std::string& text, Index expected) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DomainError("intensity csv: empty file");
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(field, &used);
      if (used != field.size() || !std::isfinite(v) || v < 0.0) throw std::invalid_argument(field);
      values.push_back(v);
    } catch (const std::exception&) {
      throw DomainError("intensity csv: bad value '" + field + "'");
    }
  }
  if (static_cast<Index>(values.size()) != expected) {
    throw DomainError("intensity csv: expected " + std::to_string(expected) + " rows, found " +
                      std::to_string(values.size()));
  }
  return Eigen::Map<RVector>(values.data(), expected);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move " + tmp.string() + " into place");
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void cmd_gen(const ScenarioSpec& spec_in, const fs::path& out_dir) {
  ScenarioSpec spec = spec_in;
  spec.intensities_file.reset();
  const Problem problem = prepare_problem(spec);
  fs::create_directories(out_dir);
  write_file_atomic(out_dir / "intensities.csv", intensities_to_csv(problem.measured, spec.shape));
  spec.intensities_file = "intensities.csv";
  write_file_atomic(out_dir / "scenario.json", scenario_to_json(spec));
}

RunOutcome cmd_run(const fs::path& scenario_path, const fs::path& out_dir,
                   const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  std::string raw;
  ScenarioSpec spec;
  std::optional<Problem> problem;
  json overrides = json::object();
  try {
    raw = read_file(scenario_path);
    spec = scenario_from_json(raw);
    if (options.max_iter) {
      if (*options.max_iter < 0) throw DomainError("--max-iter must be non-negative");
      spec.filter.max_iter = *options.max_iter;
      overrides["max_iter"] = *options.max_iter;
    }
    if (options.seed) {
      overrides["seed"] = *options.seed;
      if (spec.kind == ScenarioKind::random_2d && *options.seed != spec.seed) {
        // New draw: stored measurements belong to the old truth.
        spec.scatterers = random_scatterers(spec.shape, spec.random_count, *options.seed);
        spec.intensities_file.reset();
      }
      spec.seed = *options.seed;
    }
    problem.emplace(prepare_problem(spec, scenario_path.parent_path()));
  } catch (const Error& e) {
    return {kExitMalformed, e.what()};
  }
  const Problem& pb = *problem;

  json report;
  report["schema"] = kReportSchema;
  report["scenario"] = spec.name;
  report["config_echo"] = raw;
  report["overrides"] = overrides;
  report["grid"] = {{"rows", spec.shape.rows}, {"cols", spec.shape.cols}};
  report["support_threshold"] = spec.filter.support_threshold();

  auto finish = [&](const json& r) {
    fs::create_directories(out_dir);
    write_file_atomic(out_dir / "report.json", r.dump(2) + "\n");
  };
  auto seconds = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  Reconstruction rec;
  try {
    rec = reconstruct(pb.measured, pb.x0, pb.sensors, spec.filter);
  } catch (const DivergenceError& e) {
    report["status"] = "diverged";
    report["divergence"] = {{"iteration", e.iteration()}, {"message", e.what()}};
    report["wall_clock_seconds"] = seconds();
    try {
      finish(report);
    } catch (const std::exception&) {
    }
    return {kExitDivergence, e.what()};
  } catch (const Error& e) {
    return {kExitMalformed, e.what()};
  }

  const AlignedError err = aligned_error(rec.x, pb.truth, pb.shape);
  const CVector in_truth_frame = align_to_reference(rec.x, err.alignment, pb.shape);
  const double threshold = spec.filter.support_threshold();

  std::vector<double> est_mod, est_phase;
  for (Index j = 0; j < rec.x.size(); ++j) {
    est_mod.push_back(std::abs(rec.x(j)));
    est_phase.push_back(principal_phase(rec.x(j)));
  }
  report["status"] = "ok";
  report["iterations_run"] = rec.trace.iterations_run;
  report["plateau_iteration"] =
      rec.trace.plateau_iteration ? json(*rec.trace.plateau_iteration) : json(nullptr);
  report["aligned_error"] = err.error;
  report["relative_aligned_error"] = err.error / pb.truth.norm();
  report["alignment"] = {{"row_shift", err.alignment.row_shift},
                         {"col_shift", err.alignment.col_shift},
                         {"reflected", err.alignment.reflected},
                         {"phase", err.alignment.phase}};
  report["truth_l1"] = pb.truth.lpNorm<1>();
  report["final_l1"] = rec.x.lpNorm<1>();
  report["estimate"] = {{"modulus", est_mod}, {"phase", est_phase}};
  report["trace"] = {{"l1_true", rec.trace.l1_true},
                     {"l1_linearized", rec.trace.l1_linearized},
                     {"max_intensity_residual", rec.trace.intensity_residual_max},
                     {"gamma", rec.trace.gamma}};
  report["wall_clock_seconds"] = seconds();

  try {
    fs::create_directories(out_dir);
    write_file_atomic(out_dir / "sites.csv", sites_csv(pb.truth, in_truth_frame, threshold));
    write_file_atomic(out_dir / "trace.csv", trace_csv(rec.trace));
    finish(report);
  } catch (const std::exception& e) {
    return {kExitMalformed, e.what()};
  }
  return {kExitOk, "aligned error " + fmt17(err.error)};
}

std::vector<std::string> validate_report(const std::string& json_text) {
  std::vector<std::string> problems;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    return {std::string("not JSON: ") + e.what()};
  }
  if (!j.is_object()) return {"top level is not an object"};

  auto need = [&](const char* key, auto predicate, const char* type) {
    if (!j.contains(key)) {
      problems.push_back(std::string("missing '") + key + "'");
    } else if (!predicate(j.at(key))) {
      problems.push_back(std::string("'") + key + "' is not " + type);
    }
  };
  auto is_string = [](const json& v) { return v.is_string(); };
  auto is_number = [](const json& v) { return v.is_number(); };
  auto is_object = [](const json& v) { return v.is_object(); };
  auto is_count = [](const json& v) { return v.is_number_integer() && v.get<long long>() >= 0; };

  need("schema", is_string, "a string");
  if (j.contains("schema") && j["schema"] != kReportSchema) problems.push_back("unexpected schema tag");
  need("scenario", is_string, "a string");
  need("config_echo", is_string, "a string");
  need("overrides", is_object, "an object");
  need("grid", is_object, "an object");
  need("support_threshold", is_number, "a number");
  need("wall_clock_seconds", is_number, "a number");
  need("status", is_string, "a string");
  if (!problems.empty()) return problems;

  const Index n = j["grid"].value("rows", Index{0}) * j["grid"].value("cols", Index{0});
  if (n <= 0) problems.push_back("grid extents must be positive");

  const std::string status = j["status"];
  if (status == "diverged") {
    need("divergence", is_object, "an object");
    return problems;
  }
  if (status != "ok") {
    problems.push_back("unknown status '" + status + "'");
    return problems;
  }

  need("iterations_run", is_count, "a non-negative integer");
  if (!j.contains("plateau_iteration") ||
      !(j["plateau_iteration"].is_null() || is_count(j["plateau_iteration"]))) {
    problems.push_back("'plateau_iteration' must be null or a non-negative integer");
  }
  need("aligned_error", is_number, "a number");
  need("relative_aligned_error", is_number, "a number");
  need("truth_l1", is_number, "a number");
  need("final_l1", is_number, "a number");
  need("alignment", is_object, "an object");
  need("estimate", is_object, "an object");
  need("trace", is_object, "an object");
  if (!problems.empty()) return problems;

  const json& a = j["alignment"];
  if (!(a.contains("row_shift") && a["row_shift"].is_number_integer() && a.contains("col_shift") &&
        a["col_shift"].is_number_integer() && a.contains("reflected") && a["reflected"].is_boolean() &&
        a.contains("phase") && a["phase"].is_number())) {
    problems.push_back("'alignment' needs row_shift, col_shift, reflected, phase");
  }

  auto numeric_array = [](const json& v, std::size_t len) {
    if (!v.is_array() || v.size() != len) return false;
    return std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); });
  };
  for (const char* key : {"modulus", "phase"}) {
    if (!j["estimate"].contains(key) || !numeric_array(j["estimate"][key], static_cast<std::size_t>(n))) {
      problems.push_back(std::string("'estimate.") + key + "' must hold one number per site");
    }
  }
  const auto iters = static_cast<std::size_t>(j["iterations_run"].get<long long>());
  for (const char* key : {"l1_true", "l1_linearized", "max_intensity_residual", "gamma"}) {
    if (!j["trace"].contains(key) || !numeric_array(j["trace"][key], iters)) {
      problems.push_back(std::string("'trace.") + key + "' must hold one number per iteration");
    }
  }
  return problems;
}

}  // namespace qcs
