#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "saddlecheck/biot_examples.hpp"

namespace saddlecheck {

enum class Analysis { Constants, Witness, Precond, ReferenceInfSup };

const char* to_string(Analysis analysis);

struct RunConfig {
  int example_id = 0;
  std::vector<int> levels{2, 4};
  /// Explicit axes from the config; empty means the example's default grid.
  ParameterGrid grid;
  std::set<Analysis> analyses{Analysis::Constants};
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int witness_samples = 100;
  double tol = 1e-8;
  int max_iter = 1000;
  std::vector<std::string> warnings;

  ParameterGrid effective_grid() const;
};

/// `key = value` lines, `#` comments, comma-separated lists. Throws
/// ParseError (with line number) or ValidationError (naming the key).
RunConfig parse_config_text(const std::string& text);
/// As above; IoError if the file cannot be read.
RunConfig parse_config(const std::string& path);

inline constexpr int kMaxLevel = 16;  // largest example stays under the desk-scale limit

/// Comma-separated mesh levels in [1, kMaxLevel].
std::vector<int> parse_levels(const std::string& text);

enum ExitCode : int { kExitOk = 0, kExitInvariantFailure = 2, kExitConfigError = 3, kExitIoError = 4 };

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<std::string> failures;
  std::vector<std::string> files;
  /// Grid points whose S_Q + C failed the SPD tolerance (recorded as nan rows).
  int unbuildable = 0;
};

inline constexpr const char* kConstantsHeader =
    "example,level,param_point,C_a_bar,C_a_under,beta_under,alpha_under,C_bar,epsilon,delta,"
    "theoretical_bound,hypotheses_ok";

/// Runs every requested analysis and writes one CSV per kind plus meta.txt
/// into config.out_dir. Failures are listed on `err`. Throws IoError.
RunOutcome run(const RunConfig& config, std::ostream& err);

/// printf %.17g, which round-trips every double.
std::string format_number(double value);

}  // namespace saddlecheck
