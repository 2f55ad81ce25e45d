#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "saddlecheck/biot_examples.hpp"

namespace saddlecheck {

/// x ↦ 𝒩⁻¹x with 𝒩 = blockdiag(Vbar, Qbar), via the stored Cholesky factors.
LinearOperator<double> block_diag_preconditioner(const Norms& norms);

/// Same Vbar block, but the plain L² mass on Q. Deliberately not robust.
LinearOperator<double> mass_q_preconditioner(const Norms& norms, const Matrix& q_mass);

enum class PreconditionerKind { Fitted, MassQ };

struct PrecondRun {
  int example_id = 0;
  std::string param_point;
  int level = 0;
  int iterations = 0;
  bool converged = false;
  double final_residual = 0;
  bool hypotheses_ok = false;
  double C_bar = 0;
  double alpha_under = 0;
  bool built = true;  // false when S_Q + C failed the SPD tolerance
  std::string error;  // why the problem was not built, or the MinRes breakdown
};

struct PrecondOptions {
  double tol = 1e-8;
  int max_iter = 1000;
  std::uint64_t seed = 20240611;
  PreconditionerKind kind = PreconditionerKind::Fitted;
  /// Also compute the Babuška constants (needed by the spread assertion).
  bool with_constants = true;
};

/// MinRes on 𝒜x = 𝒜x★ with x★ drawn from the seed.
PrecondRun run_preconditioned_minres(const DiscreteProblem& problem, const PrecondOptions& options,
                                     const std::string& param_point = "");

struct AxisSpread {
  std::string axis;
  std::string fixed;  // values of the other axes along this line
  int level = 0;
  int min_iterations = 0;
  int max_iterations = 0;
  bool applicable = false;  // every point built, converged and met the hypotheses
  bool ok = true;           // max/min ≤ 4 when applicable

  double ratio() const { return min_iterations > 0 ? double(max_iterations) / min_iterations : 0.0; }
};

struct SweepResult {
  std::vector<PrecondRun> runs;
  std::vector<AxisSpread> spreads;
  bool ok() const;
};

inline constexpr double kMaxIterationSpread = 4.0;

/// One MinRes run per grid point and level, plus the iteration spread along
/// every axis line of the tensor grid. Non-convergence is recorded, not thrown.
SweepResult robustness_sweep(int example_id, const ParameterGrid& grid, const std::vector<int>& levels,
                             const PrecondOptions& options, const ExampleParams& base = {});

}  // namespace saddlecheck
