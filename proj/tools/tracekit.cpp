// tracekit: run one verification experiment and emit CSV rows plus a JSON report.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tracekit/errors.hpp"
#include "tracekit/report.hpp"

using nlohmann::json;
using namespace tracekit;

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> geometry, bc, lambda, lambda_grid, indices, eta, phi, out, cache_dir, shape;
  std::optional<double> length, a, b, y0, epsilon, plateau, tail_tol, tol, radius, step, support;
  std::optional<int> kmax, threads, dim;
  bool sampled = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double to_num(const std::string& s, const std::string& flag) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(flag + ": '" + s + "' is not a number");
  }
}

json num_array(const std::string& s, const std::string& flag) {
  json a = json::array();
  for (const auto& x : split(s, ',')) a.push_back(to_num(x, flag));
  return a;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config document (flags override it)");
  sub->add_option("--geometry", f.geometry, "interval | disc | rectangle");
  sub->add_option("--length", f.length, "interval length");
  sub->add_option("--a", f.a, "rectangle width");
  sub->add_option("--b", f.b, "rectangle height");
  sub->add_option("--y0", f.y0, "rectangle line height");
  sub->add_option("--bc", f.bc, "dirichlet | neumann");
  sub->add_option("--lambda", f.lambda, "comma-separated lambda values");
  sub->add_option("--lambda-grid", f.lambda_grid, "start:stop:count");
  sub->add_option("--kmax", f.kmax, "transverse indices 0..kmax (1..kmax on the rectangle)");
  sub->add_option("--indices", f.indices, "comma-separated transverse indices");
  sub->add_option("--eta", f.eta, "comma-separated eta values");
  sub->add_option("--phi", f.phi, "interval signal: value at 0,value at L");
  sub->add_option("--epsilon", f.epsilon, "window support of rho-hat");
  sub->add_option("--plateau", f.plateau, "plateau fraction p (rho-hat = 1 on |t| <= p epsilon)");
  sub->add_option("--tail-tol", f.tail_tol, "window tail truncation tolerance");
  sub->add_option("--tol", f.tol, "tolerance of the experiment's primary rule");
  sub->add_option("--out", f.out, "output directory for <experiment>.csv/.json");
  sub->add_option("--cache-dir", f.cache_dir, "Bessel-zero cache directory (default $TRACEKIT_CACHE_DIR)");
  sub->add_option("--threads", f.threads, "worker threads");
  sub->add_option("--shape", f.shape, "circle | sphere | cylinder");
  sub->add_option("--radius", f.radius, "shape radius");
  sub->add_option("--dim", f.dim, "ambient dimension of the sphere");
  sub->add_flag("--sampled", f.sampled, "also check a sampled Fermi profile");
  sub->add_option("--step", f.step, "ansatz grid step");
  sub->add_option("--support", f.support, "local Weyl symbol support");
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
}

json merged_document(const std::string& experiment, const Flags& f) {
  json j = f.config.empty() ? json::object() : load_config(f.config);
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  j["experiment"] = experiment;
  if (f.geometry) {
    if (!j.contains("geometry") || !j["geometry"].is_object() || j["geometry"].value("type", "") != *f.geometry)
      j["geometry"] = json::object();
    j["geometry"]["type"] = *f.geometry;
  }
  auto geo = [&](const char* key, const std::optional<double>& v) {
    if (!v) return;
    if (!j.contains("geometry")) throw ConfigError(std::string("--") + key + ": needs --geometry");
    j["geometry"][key] = *v;
  };
  geo("length", f.length);
  geo("a", f.a);
  geo("b", f.b);
  geo("y0", f.y0);
  if (f.bc) j["bc"] = *f.bc;
  if (f.lambda) {
    j.erase("lambda_grid");
    j["lambda"] = num_array(*f.lambda, "--lambda");
  }
  if (f.lambda_grid) {
    auto p = split(*f.lambda_grid, ':');
    if (p.size() != 3) throw ConfigError("--lambda-grid: expected start:stop:count");
    j.erase("lambda");
    j["lambda_grid"] = {{"start", to_num(p[0], "--lambda-grid")},
                        {"stop", to_num(p[1], "--lambda-grid")},
                        {"count", static_cast<int>(to_num(p[2], "--lambda-grid"))}};
  }
  if (f.kmax) {
    j.erase("indices");
    j["kmax"] = *f.kmax;
  }
  if (f.indices) {
    j.erase("kmax");
    json a = json::array();
    for (const auto& x : split(*f.indices, ',')) a.push_back(static_cast<int>(to_num(x, "--indices")));
    j["indices"] = a;
  }
  if (f.eta) j["eta"] = num_array(*f.eta, "--eta");
  if (f.phi) j["phi"] = num_array(*f.phi, "--phi");
  if (f.epsilon || f.plateau || f.tail_tol) {
    if (!j.contains("window")) j["window"] = json::object();
    if (f.epsilon) j["window"]["epsilon"] = *f.epsilon;
    if (f.plateau) j["window"]["plateau_fraction"] = *f.plateau;
    if (f.tail_tol) j["window"]["tail_tolerance"] = *f.tail_tol;
  }
  if (f.tol) j["tolerances"]["primary"] = *f.tol;
  if (f.out) j["output"]["dir"] = *f.out;
  if (f.cache_dir) j["cache_dir"] = *f.cache_dir;
  else if (!j.contains("cache_dir") && !default_cache_dir().empty()) j["cache_dir"] = default_cache_dir();
  if (f.threads) j["threads"] = *f.threads;
  if (f.shape || f.radius || f.dim) {
    if (!j.contains("shape")) j["shape"] = {{"type", "circle"}};
    if (f.shape) j["shape"]["type"] = *f.shape;
    if (f.radius) j["shape"]["radius"] = *f.radius;
    if (f.dim) j["shape"]["dim"] = *f.dim;
  }
  if (f.sampled) j["profile"] = "sampled";
  if (f.step) j["step"] = *f.step;
  if (f.support) j["symbol_support"] = *f.support;
  return j;
}

int run_experiment(const std::string& name, const Flags& f) {
  const ExperimentConfig cfg = config_from_json(merged_document(name, f));
  const Report rep = run(cfg);
  if (cfg.out_dir.empty())
    std::cout << rep.csv();
  else
    write_outputs(rep);
  std::size_t ok = 0;
  for (const auto& r : rep.rules) {
    if (r.passed) {
      ++ok;
      continue;
    }
    std::fprintf(stderr, "FAIL %s: measured %s, target %s, tolerance %s (%s)\n", r.name.c_str(),
                 format_double(r.measured).c_str(), format_double(r.target).c_str(),
                 format_double(r.tolerance).c_str(), r.comparison.c_str());
  }
  std::fprintf(stderr, "%s: %zu/%zu rules passed\n", name.c_str(), ok, rep.rules.size());
  return rep.passed() ? kExitPass : kExitRuleFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tracekit: numerical checks of boundary-trace completeness and Kuznecov sums"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Flags flags;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& name : experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    add_common(sub, flags);
    subs.emplace_back(name, sub);
  }

  std::string action, cache_dir;
  int kmax = 20, cache_threads = 1;
  double upper = 100.0;
  auto* cache = app.add_subcommand("cache", "inspect or maintain the Bessel-zero cache");
  cache->add_option("action", action, "status | clear | rebuild")->required();
  cache->add_option("--cache-dir", cache_dir, "cache directory (default $TRACEKIT_CACHE_DIR)");
  cache->add_option("--kmax", kmax, "rebuild: highest order");
  cache->add_option("--upper", upper, "rebuild: zeros below this bound");
  cache->add_option("--threads", cache_threads, "rebuild: worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (cache->parsed()) {
      if (cache_dir.empty()) cache_dir = default_cache_dir();
      auto s = cache_admin(cache_dir, action, kmax, upper, cache_threads);
      std::printf("action %s\npath %s\norders %zu\nrecords %zu\nbytes %ju\nstale %s\n", s.action.c_str(),
                  s.path.c_str(), s.orders, s.records, s.bytes, s.stale ? "yes" : "no");
      return kExitPass;
    }
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) return run_experiment(name, flags);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const RangeError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const CacheError& e) {
    std::fprintf(stderr, "cache error: %s\n", e.what());
    return kExitCache;
  } catch (const std::runtime_error& e) {
    // ConsistencyError, AccuracyError, DataError
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitConfig;
}
