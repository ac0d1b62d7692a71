#pragma once

#include "subfp/force_field.hpp"
#include "subfp/grid.hpp"
#include "subfp/weights.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace subfp {

/// Validation or parse failure; `field()` is the offending key.
class ConfigError : public std::invalid_argument {
public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument("config: " + field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

private:
  std::string field_;
};

struct ExperimentConfig {
  // field.*
  std::string field_kind = "canonical";  // canonical | rotated | custom
  double gamma = 0.5;
  double scale = 1.0;
  double amplitude = 0.0;
  double modulation = 0.0;  // c in 1 + c x1/<x>; 0 keeps the stream function
  double R0 = 1.0;
  std::string F1;
  std::string F2;
  // grid.*
  int dim = 1;
  double L = 50.0;
  int n = 1024;
  // norm.*
  double p = 1.0;
  std::string family = "polynomial";  // unit | polynomial | stretched | critical
  double k = 4.0;
  double kappa = 0.8;
  double s = 0.3;
  double theta = 0.0;
  // initial.*
  std::string initial_kind = "bump";  // bump | heavy-tail | delta | csv
  double center = 0.0;
  double center_y = 0.0;
  double width = 1.0;
  double exponent = 6.0;
  std::string initial_path;
  bool mean_zero = false;
  // time.*
  double t_first = 0.01;
  double t_end = 1e4;
  double t_ratio = 1.15;
  double dt = 1e-3;
  // fit.*
  std::string envelope = "stretched";  // stretched | polynomial
  std::string fit_norm = "G";          // G: L^2(G^{-1/2});  spec: the norm.* spec
  double sigma = 0.0;                  // 0: theoretical default
  double burn_fraction = 0.5;
  double beta_factor = 0.8;
  double min_r2 = 0.98;
  // spectrum.*
  int spectrum_count = 6;
  // splitting.*
  double a_factor = 0.5;
  double scan_radius = 1e6;
  int scan_points = 10000;
  // lyapunov.*
  double lyap_kappa = 0.5;
  double lyap_zeta0 = 0.05;
  double lyap_M = 1.0;
  double lyap_R = 8.0;

  std::vector<std::string> tasks{"steady"};
  std::string output;
  unsigned seed = 1;

  bool operator==(const ExperimentConfig&) const = default;
};

const std::vector<std::string>& known_tasks();

/// Parse the flat `key = value` format. Unknown keys and malformed values raise
/// ConfigError naming the key. Does not validate ranges.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

/// Range and consistency checks; throws ConfigError naming the field.
void validate_config(const ExperimentConfig& cfg);

ForceField build_field(const ExperimentConfig& cfg);
Weight build_weight(const ExperimentConfig& cfg);
NormSpec build_norm(const ExperimentConfig& cfg);

/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace subfp
