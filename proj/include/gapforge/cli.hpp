#pragma once

/**
 * @file cli.hpp
 * @brief The gapforge command-line driver as a library entry point, so the
 * tests can run it in-process.
 *
 * Exit codes: 0 success, 1 configuration error, 2 numerical diagnostic
 * failure (non-convergence, ill-conditioning, flagged Monte Carlo fit),
 * 3 verification failure.
 */

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gapforge {

inline constexpr const char* kConfigSchema = "gapforge.config/1";
inline constexpr const char* kVerifySchema = "gapforge.verify/1";

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2, kExitVerification = 3 };

struct ExperimentConfig {
  std::string command;
  std::string model = "star";
  std::optional<double> m;      // default depends on the model
  std::optional<double> gamma;  // default: the model's reversible shape, else 1
  double E = 1.0;
  int N = 3;
  std::string topology = "long-range";
  std::string method = "galerkin";  // galerkin | mc
  int degree = 0;                   // 0: default_degree(N)
  int quadrature_level = 5;
  std::uint64_t budget = 1000000;
  std::uint64_t seed = 1;
  std::string output = "-";
  std::string run_dir;
  int jobs = 1;
  std::vector<double> E_list;
  std::vector<int> N_list;
  std::vector<double> m_list;
  std::vector<double> gamma_list;
  std::string suite = "all";  // appendix | theorems | all
  std::string format = "json";  // json | summary
  int i = 1;
  int j = 2;
  double t_max = 10.0;
  double stride = 0.1;
  int M = 64;
  int n_max = 200;
};

// Default m for a model id: 0 for star and kmp, 1/2 for gg2 and gg3, 1 for stick.
double default_m(const std::string& model);
// Default gamma: 3/2 for gg3, 1 otherwise.
double default_gamma(const std::string& model);

// Master seed from GAPFORGE_SEED, or 1 when unset. Throws ConfigError on a
// malformed value.
std::uint64_t seed_from_environment();

// Applies a JSON config file's contents. Throws ConfigError on a missing or
// wrong schema field, an unknown key, or a key the command does not take.
void apply_config_json(ExperimentConfig& config, const std::string& json_text);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gapforge
