#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tracekit/curvature.hpp"
#include "tracekit/spectra.hpp"
#include "tracekit/window.hpp"

namespace tracekit {

constexpr const char* kToolVersion = "0.1.0";
constexpr int kReportSchemaVersion = 1;

enum class Experiment {
  PoissonCheck,
  Completeness,
  SecondOrder,
  SymbolScan,
  Interior,
  Kuznecov,
  Weyl,
  Curvature,
  AnsatzCheck
};
const char* to_string(Experiment e);
Experiment parse_experiment(const std::string& s);  // ConfigError on unknown names
const std::vector<std::string>& experiment_names();

struct ExperimentConfig {
  Experiment experiment = Experiment::PoissonCheck;
  Geometry geometry = Disc{};
  Boundary bc = Boundary::Dirichlet;
  std::optional<WindowSpec> window;
  std::vector<double> lambdas;   // ascending
  std::vector<int> indices;      // transverse indices (k or m)
  std::vector<double> etas;
  std::vector<double> phi;       // interval signal values at the two endpoints
  Shape shape = Circle{};
  bool sampled_profile = false;
  double step = 1e-3;            // ansatz grid step
  double symbol_support = 0.7;   // local Weyl symbol max(0, 1 - (s/support)^2)
  std::map<std::string, double> tolerances;  // overrides of rule tolerances
  std::string out_dir;           // empty: CSV to stdout, no JSON file
  std::string cache_dir;
  int threads = 1;

  nlohmann::json to_json() const;
};

// Parse and schema-check; errors name the offending field path.
ExperimentConfig config_from_json(const nlohmann::json& j);
void validate(const ExperimentConfig& c);

struct Rule {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  std::string comparison;  // how measured, target and tolerance relate
};

struct Report {
  ExperimentConfig config;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // cells already formatted
  std::vector<Rule> rules;
  nlohmann::json window;  // null when no window was used
  nlohmann::json summary = nlohmann::json::object();
  std::map<std::string, double> timings;

  bool passed() const;
  std::string csv() const;
  nlohmann::json json() const;
};

// 17 significant digits; the representation used in every CSV.
std::string format_double(double v);

Report run(const ExperimentConfig& config);

// Writes <out_dir>/<experiment>.csv and .json (when out_dir is set).
void write_outputs(const Report& r);

// Exit codes of the command-line tool.
enum ExitCode { kExitPass = 0, kExitRuleFailed = 1, kExitConfig = 2, kExitNumerical = 3, kExitCache = 4 };

struct CacheSummary {
  std::string path;
  std::size_t records = 0;
  std::size_t orders = 0;
  std::uintmax_t bytes = 0;
  bool stale = false;
  std::string action;
};
// action: status | clear | rebuild. Rebuild recomputes both zero kinds for
// orders 0..kmax below `upper` and verifies interlacing before storing.
CacheSummary cache_admin(const std::string& dir, const std::string& action, int kmax = 0,
                         double upper = 0.0, int threads = 1);

// Default cache directory: $TRACEKIT_CACHE_DIR if set, else empty (no cache).
std::string default_cache_dir();

}  // namespace tracekit
