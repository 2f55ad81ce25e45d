#pragma once

// Discrete instances of the seven poromechanics model problems, each with the
// seminorm pair (S_Q, S_V) that makes its fitted norms parameter-robust.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "saddlecheck/analysis.hpp"
#include "saddlecheck/fem.hpp"
#include "saddlecheck/mesh.hpp"

namespace saddlecheck {

struct ExampleParams {
  double t = 1;
  double kappa = 1;
  double lambda = 1;
  double mu = 1;
  double c0 = 1;
  double alpha_bw = 1;
  double tau = 1;
  double eta = 0;  // 0 selects α²/(1+λ)
  // Rescaled Example 7 parameters. Kept as independent fields so they can be
  // swept directly; derive() recomputes them from the primitives.
  double lambda_mu = 0.5;
  double R_p = 1;
  double alpha_p = 1;

  double eta_value() const;
  /// λ_μ = λ/(2μ), R_p = τκ/α², α_p = c₀/α².
  ExampleParams& derive();
  bool derived_consistent(double rel_tol = 1e-14) const;

  double get(const std::string& name) const;
  void set(const std::string& name, double value);
  static const std::vector<std::string>& field_names();
};

/// Parameter names each example reads.
const std::vector<std::string>& example_parameters(int example_id);
/// Throws ValidationError naming the offending field.
void validate_params(int example_id, const ExampleParams& params);

struct DiscreteProblem {
  int example_id = 0;
  int level = 0;
  ExampleParams params;
  std::shared_ptr<const Mesh> mesh;
  std::vector<FESpace> v_spaces;
  std::vector<FESpace> q_spaces;
  System system;
  /// Part of C acting only on the constant mode of zero-mean Q blocks.
  Matrix mean_mode;
  /// Block-diagonal L² mass on Q (after boundary reduction).
  Matrix q_mass;
  Norms norms;
};

DiscreteProblem build_example1(int n, double t);
DiscreteProblem build_example2(int n, double kappa);
DiscreteProblem build_example3(int n, const ExampleParams& params);
DiscreteProblem build_example4(int n, const ExampleParams& params);
DiscreteProblem build_example5(int n, const ExampleParams& params);
DiscreteProblem build_example6(int n, const ExampleParams& params);
DiscreteProblem build_example7(int n, const ExampleParams& params);
DiscreteProblem build_example(int example_id, int n, const ExampleParams& params);

struct ParameterGrid {
  std::vector<std::pair<std::string, std::vector<double>>> axes;

  std::size_t size() const;
  /// Tensor-product points, last axis fastest; unswept fields come from base.
  std::vector<ExampleParams> points(const ExampleParams& base = {}) const;
  std::string label(std::size_t index) const;
};

const std::vector<double>& default_sweep_values();
ParameterGrid default_grid(int example_id);

enum class PressureSpace { P0, P0ZeroMean, P1, P1ZeroMean, P1Dirichlet };

struct InfSup {
  double beta = 0;
  bool degenerate = false;
};

/// sup over P2-vector H¹₀ of (div v, q)/‖v‖₁, inf over q.
InfSup stokes_infsup(int n, PressureSpace pressure);
/// Same for RT0 (optionally with zero normal trace) against ‖·‖_div.
InfSup darcy_infsup(int n, bool rt_dirichlet, PressureSpace pressure);

struct ReferenceInfSup {
  InfSup beta_d;
  InfSup beta_s;
};

/// Discrete Darcy and Stokes constants for the pairs used by an example.
ReferenceInfSup discrete_reference_infsup(int n, int example_id = 7);

/// Lower bound for β̲ implied by the classical constants for each example.
double example_beta_floor(int example_id, const ReferenceInfSup& ref);

}  // namespace saddlecheck
