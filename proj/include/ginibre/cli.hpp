#pragma once

// Command-line layer: a serializable run configuration, the five subcommands,
// and artifact writers that echo the resolved configuration.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ginibre/density.hpp"
#include "ginibre/params.hpp"

namespace ginibre::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2, kVerificationFailed = 3 };

struct RunConfig {
  std::string command;
  std::string ensemble = "elliptic";
  int N = 1;
  double tau = 0.0;
  int nu = 0;
  double mu = 0.0;
  double n = 1.0;
  std::complex<double> lambda = 0.0;
  std::complex<double> gamma = 0.0;
  /// kernel: "F", "K" or "both".
  std::string which = "both";
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;
  int shards = 1;
  std::string out;
  /// "csv" or "json".
  std::string format;
  /// verify: pass iff |z| <= threshold.
  double threshold = 4.0;
  GridSpec grid;
  /// density: weight id; empty selects the ensemble default.
  std::string weight;
  /// density: "closed" or "mc".
  std::string source = "closed";
  bool compare_mc = false;
  int cell_order = 1;
  /// density: "raw" or "unit".
  std::string normalization = "raw";
  std::int64_t min_count = 500;
  /// spectrum: relative inflation of the support ellipse.
  double margin = 0.05;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& config);
/// Throws ValidationError on missing or mistyped fields.
RunConfig config_from_json(const nlohmann::json& j);

/// Reads the configuration embedded in an output artifact (CSV `# config=`
/// header or JSON `config` member) or a bare configuration JSON file.
RunConfig load_config(const std::string& path);

/// Parses "a+bi", "a-bi", "bi", "a" (also with j). Throws ValidationError.
std::complex<double> parse_complex(const std::string& text);

/// Elliptic or chiral parameters from the config (validated).
EnsembleParams make_params(const RunConfig& config);

struct VerifyReport {
  std::complex<double> closed_form;
  std::complex<double> mc_mean;
  double stderr = 0.0;
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  /// max(|d_re|, |d_im|) / stderr, where d = mc_mean - closed_form.
  double z_score = 0.0;
  bool pass = false;
  std::int64_t samples = 0;
};

/// Closed form vs Monte Carlo for F at (lambda, gamma).
VerifyReport run_verify(const RunConfig& config);

struct SelftestCheck {
  std::string name;
  bool pass = false;
  std::string detail;
  double millis = 0.0;
};

/// Desk-scale invariant suite. `inject_fault` swaps in a kernel with one
/// corrupted coefficient so that the suite must fail.
std::vector<SelftestCheck> run_selftest(std::uint64_t seed, bool inject_fault);

/// Entry point; returns the process exit code. Diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ginibre::cli
