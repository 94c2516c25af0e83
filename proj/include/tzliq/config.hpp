#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tzliq/grid.hpp"
#include "tzliq/model.hpp"

namespace tzliq {

/// Configuration parse/shape errors (missing section, unknown key, bad
/// value). The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A named analytic coefficient family as written in the config:
///   constant <c>
///   affine <c0> <c1>        -> c0 + c1*(y - a), clipped to [-Lambda, Lambda]
///   sinusoidal <c0> <amp> <omega> -> c0 + amp*sin(omega*t)
/// `inf` is accepted as a value (dark-pool coefficient switched off).
struct CoeffSpec {
  std::string family = "constant";
  std::vector<double> params{0.0};

  Coefficient build(double a, double Lambda) const;
  std::string to_string() const;
  static CoeffSpec parse(const std::string& text, const std::string& key);
  bool operator==(const CoeffSpec&) const = default;
};

/// Parsed run configuration. [model] and [grid] are required; every other
/// key has the documented default below.
struct RunConfig {
  // [model]
  double q = 2.0;
  double horizon = 1.0;
  double barrier = 0.0;
  double bound_lambda = 1.0;
  double kappa = 1.0;
  double kappa0 = 1.0;
  CoeffSpec beta, sigma;
  CoeffSpec sigma_bar{"constant", {1.0}};
  CoeffSpec eta{"constant", {1.0}};
  CoeffSpec lam{"constant", {0.0}};
  CoeffSpec gamma{"constant", {std::numeric_limits<double>::infinity()}};
  std::vector<Mark> marks{{0.0, 1.0}};

  // [grid]
  double y_max = 4.0;
  std::size_t n_space = 200;
  std::size_t n_time = 300;
  std::size_t n_refine = 100;
  double refine_ratio = 0.93;

  // [ladder]
  std::vector<double> m_schedule{1.0, 10.0, 100.0, 1000.0};
  double t_cut = 0.5;
  double eps_ladder = 1e-3;
  double eps_domain = 1e-3;
  std::optional<double> tau_mono;  ///< absent -> 10x measured scheme error
  std::optional<double> tau_env;

  // [mc]
  std::size_t n_paths = 10000;
  double dt = 1e-3;
  std::uint64_t seed = 12345;
  double x0 = 1.0;
  double y0 = 1.0;

  // [simulate]
  std::string strategy = "twap";  ///< twap | optimal | no-dark-pool
  std::size_t dump_paths = 4;

  // [verify]
  std::vector<std::string> fixtures{"builtin"};

  // [output]
  std::string out_dir = "out";
  std::vector<std::string> formats{"csv", "bin"};

  bool operator==(const RunConfig&) const = default;
};

/// Parses the key-value config format: [section] headers, key = value
/// lines, '#' comments. Unknown sections or keys and missing required
/// sections raise ConfigError naming the offender.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_string(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical serialization; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& c);

/// FNV-1a hash of the canonical serialization, with the [output] section
/// normalized away (it says where artifacts land, not what they contain);
/// stamped into every artifact.
std::uint64_t config_hash(const RunConfig& c);

ModelParams build_model(const RunConfig& c);
Grid build_grid(const RunConfig& c);

}  // namespace tzliq
