// Run configuration: a flat key-value file with dotted keys. Command-line
// flags override file values; presets fill everything with known-good
// parameter sets. The canonical echo is embedded in every output so a run is
// reproducible from its artifacts.

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ersi/csv.hpp"
#include "ersi/errors.hpp"
#include "ersi/forward.hpp"
#include "ersi/material.hpp"
#include "ersi/source.hpp"

namespace ersi {

inline constexpr std::uint32_t kConfigFormatVersion = 1;

struct RunConfig {
  // material
  double lambda = 2.0;
  double mu = 1.0;
  double kappa = 16.0;
  // geometry
  double radius = 2.0;
  std::size_t n_obs = 2048;
  // source
  std::string profile = "paper3d";
  Vec3 support_lo{-1.0, -1.0, -1.0};
  Vec3 support_hi{1.0, 1.0, 1.0};
  double h = 0.025;
  // sampling
  std::size_t n_samples = 20000;
  std::uint64_t seed = 1;
  double noise_level = 0.05;
  std::string noise_mode = "component";
  // reconstruction
  double beta = 0.875;
  double delta_xi = 0.5;
  double cond_ceiling = 1e3;
  double theta = 0.0;
  // verification knobs
  double bv_tolerance = 0.02;
  // execution
  int workers = 1;

  // Keys the user set explicitly (config file or flags); used to decide
  // whether a dataset header must match the configured material/geometry.
  std::set<std::string> explicit_keys;

  MaterialParams material() const { return MaterialParams(lambda, mu, kappa); }
  Box3 support() const { return Box3{support_lo, support_hi}; }

  void apply_preset(const std::string& name) {
    if (name == "desk") {
      kappa = 8.0;
      h = 0.05;
      n_obs = 1024;
      n_samples = 2000;
      delta_xi = 0.5;
      beta = 0.875;
    } else if (name == "paper") {
      kappa = 16.0;
      h = 0.025;
      n_obs = 2048;
      n_samples = 20000;
      delta_xi = 0.5;
      beta = 0.875;
    } else {
      throw ValidationError("unknown preset '" + name + "'");
    }
  }

  void set(const std::string& key, const std::string& value) {
    auto as_double = [&]() {
      try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
      } catch (...) {
        throw ValidationError("config: bad numeric value '" + value + "' for " + key);
      }
    };
    auto as_size = [&]() {
      const double v = as_double();
      if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v)))
        throw ValidationError("config: bad count '" + value + "' for " + key);
      return static_cast<std::size_t>(v);
    };

    explicit_keys.insert(key);
    if (key == "material.lambda") lambda = as_double();
    else if (key == "material.mu") mu = as_double();
    else if (key == "material.kappa") kappa = as_double();
    else if (key == "geometry.radius") radius = as_double();
    else if (key == "geometry.n_obs") n_obs = as_size();
    else if (key == "source.profile") profile = value;
    else if (key == "source.support.lo.x") support_lo.x = as_double();
    else if (key == "source.support.lo.y") support_lo.y = as_double();
    else if (key == "source.support.lo.z") support_lo.z = as_double();
    else if (key == "source.support.hi.x") support_hi.x = as_double();
    else if (key == "source.support.hi.y") support_hi.y = as_double();
    else if (key == "source.support.hi.z") support_hi.z = as_double();
    else if (key == "source.h") h = as_double();
    else if (key == "sampling.n_samples") n_samples = as_size();
    else if (key == "sampling.seed") seed = static_cast<std::uint64_t>(as_size());
    else if (key == "sampling.noise_level") noise_level = as_double();
    else if (key == "sampling.noise_mode") noise_mode = value;
    else if (key == "recon.beta") beta = as_double();
    else if (key == "recon.delta_xi") delta_xi = as_double();
    else if (key == "recon.cond_ceiling") cond_ceiling = as_double();
    else if (key == "recon.theta") theta = as_double();
    else if (key == "verify.bv_tolerance") bv_tolerance = as_double();
    else if (key == "workers") workers = static_cast<int>(as_size());
    else throw ValidationError("config: unknown key '" + key + "'");
  }

  // Canonical echo: sorted dotted keys, doubles at 17 digits.
  std::vector<std::pair<std::string, std::string>> key_values() const {
    std::vector<std::pair<std::string, std::string>> kv;
    auto d = [](double v) { return format_double(v); };
    kv.emplace_back("geometry.n_obs", std::to_string(n_obs));
    kv.emplace_back("geometry.radius", d(radius));
    kv.emplace_back("material.kappa", d(kappa));
    kv.emplace_back("material.lambda", d(lambda));
    kv.emplace_back("material.mu", d(mu));
    kv.emplace_back("recon.beta", d(beta));
    kv.emplace_back("recon.cond_ceiling", d(cond_ceiling));
    kv.emplace_back("recon.delta_xi", d(delta_xi));
    kv.emplace_back("recon.theta", d(theta));
    kv.emplace_back("sampling.n_samples", std::to_string(n_samples));
    kv.emplace_back("sampling.noise_level", d(noise_level));
    kv.emplace_back("sampling.noise_mode", noise_mode);
    kv.emplace_back("sampling.seed", std::to_string(seed));
    kv.emplace_back("source.h", d(h));
    kv.emplace_back("source.profile", profile);
    kv.emplace_back("source.support.hi.x", d(support_hi.x));
    kv.emplace_back("source.support.hi.y", d(support_hi.y));
    kv.emplace_back("source.support.hi.z", d(support_hi.z));
    kv.emplace_back("source.support.lo.x", d(support_lo.x));
    kv.emplace_back("source.support.lo.y", d(support_lo.y));
    kv.emplace_back("source.support.lo.z", d(support_lo.z));
    kv.emplace_back("verify.bv_tolerance", d(bv_tolerance));
    // `workers` is an execution detail, not part of the run identity: outputs
    // must compare byte-equal across worker counts.
    return kv;
  }

  std::string echo() const {
    std::ostringstream out;
    out << "config_version = " << kConfigFormatVersion << "\n";
    for (const auto& [k, v] : key_values()) out << k << " = " << v << "\n";
    return out.str();
  }

  void validate() const {
    std::vector<std::string> problems;
    auto require = [&](bool ok, const std::string& msg) {
      if (!ok) problems.push_back(msg);
    };
    require(mu > 0.0, "material.mu must be positive");
    require(lambda + 2.0 * mu > 0.0, "material.lambda + 2*mu must be positive");
    require(kappa > 0.0, "material.kappa must be positive");
    require(radius > 0.0, "geometry.radius must be positive");
    require(n_obs >= 2, "geometry.n_obs must be at least 2");
    require(h > 0.0, "source.h must be positive");
    require(support_hi.x > support_lo.x && support_hi.y > support_lo.y &&
                support_hi.z > support_lo.z,
            "source support box is degenerate");
    require(n_samples >= 1, "sampling.n_samples must be at least 1");
    require(noise_level >= 0.0, "sampling.noise_level must be nonnegative");
    require(beta > 0.0 && beta < 2.0, "recon.beta must lie in (0, 2)");
    require(delta_xi > 0.0, "recon.delta_xi must be positive");
    require(cond_ceiling > 1.0, "recon.cond_ceiling must exceed 1");
    require(bv_tolerance > 0.0, "verify.bv_tolerance must be positive");
    require(workers >= 1, "workers must be at least 1");
    if (!problems.empty()) {
      std::string msg = "invalid configuration:";
      for (const auto& s : problems) msg += "\n  - " + s;
      throw ValidationError(msg);
    }
    parse_profile_name(profile);
    parse_noise_mode(noise_mode);
  }

  bool beta_in_suggested_range() const { return beta >= 0.8 && beta <= 1.25; }
};

// Applies the file's assignments on top of `base` (defaults or a preset).
inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  RunConfig cfg = std::move(base);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config: line " + std::to_string(lineno) +
                            " is not 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "config_version") continue;
    cfg.set(key, value);
  }
  return cfg;
}

}  // namespace ersi
