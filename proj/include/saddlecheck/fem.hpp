#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

#include "saddlecheck/linalg.hpp"
#include "saddlecheck/mesh.hpp"

namespace saddlecheck {

enum class Family { P0, P1, P1Vector, P2Vector, RT0 };

const char* to_string(Family family);
bool is_scalar(Family family);

/// Finite element space on a shared mesh. DOFs are numbered over the whole
/// mesh; `constrained` marks the essential (Dirichlet) DOFs, which are removed
/// by `apply_essential_bc` rather than zeroed in place.
///
/// Numbering: P0 by triangle, P1 by vertex, P1Vector and P2Vector
/// component-blocked over nodes (vertices, then edge midpoints for P2), RT0 by
/// edge with the orientation of `Mesh::edge_normal`.
struct FESpace {
  std::shared_ptr<const Mesh> mesh;
  Family family = Family::P1;
  int ndof = 0;
  std::vector<int> dof_entity;
  std::vector<int> dof_component;
  std::vector<bool> constrained;
  bool dirichlet = false;
  bool zero_mean = false;

  int num_constrained() const;
  int num_free() const { return ndof - num_constrained(); }
  /// Full-space indices of unconstrained DOFs, ascending.
  std::vector<int> free_dofs() const;
  /// ndof × num_free injection of reduced coefficients into the full space.
  Sparse extension() const;
};

FESpace build_space(std::shared_ptr<const Mesh> mesh, Family family, bool dirichlet = false,
                    bool zero_mean = false);

enum class FormKind { Mass, Stiffness, EpsEps, DivDiv, DivCoupling, VectorMass, GradGradScalar };

struct FormSpec {
  FormKind kind = FormKind::Mass;
  double coefficient = 1.0;
  const FESpace* trial = nullptr;
  const FESpace* test = nullptr;  // defaults to trial when null
};

/// Full (unreduced) test-ndof × trial-ndof matrix of the form.
Sparse assemble(const FormSpec& form);

/// Shorthand for a form whose trial and test space coincide.
Sparse assemble(FormKind kind, const FESpace& space, double coefficient = 1.0);

/// Removes constrained rows (per `test`) and columns (per `trial`).
Sparse apply_essential_bc(const Sparse& m, const FESpace& test, const FESpace& trial);
Sparse apply_essential_bc(const Sparse& m, const FESpace& space);

/// Π₀ = I − 𝟙(𝟙ᵀM)/(𝟙ᵀM𝟙) on the full coefficient space of a scalar space.
Sparse mean_zero_projector(const FESpace& space);

/// M𝟙𝟙ᵀM / (𝟙ᵀM𝟙): the L² metric of the mean component, so that
/// Π₀ᵀMΠ₀ + mean_metric = M.
Matrix mean_metric(const FESpace& space);

/// Degree-4 symmetric triangle rule in barycentric coordinates; weights sum to 1.
struct QuadraturePoint {
  Eigen::Vector3d barycentric;
  double weight;
};
const std::vector<QuadraturePoint>& triangle_quadrature();

/// Nodal interpolant of f on a scalar P1 space (full coefficient vector).
Vector interpolate_p1(const FESpace& space, double (*f)(const Eigen::Vector2d&));

}  // namespace saddlecheck
