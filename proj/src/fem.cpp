#include "saddlecheck/fem.hpp"

#include <array>
#include <cmath>

#include "saddlecheck/errors.hpp"

namespace saddlecheck {

const char* to_string(Family family) {
  switch (family) {
    case Family::P0: return "P0";
    case Family::P1: return "P1";
    case Family::P1Vector: return "P1-vector";
    case Family::P2Vector: return "P2-vector";
    case Family::RT0: return "RT0";
  }
  return "?";
}

bool is_scalar(Family family) { return family == Family::P0 || family == Family::P1; }

int FESpace::num_constrained() const {
  int count = 0;
  for (bool c : constrained) count += c ? 1 : 0;
  return count;
}

std::vector<int> FESpace::free_dofs() const {
  std::vector<int> out;
  out.reserve(ndof);
  for (int i = 0; i < ndof; ++i)
    if (!constrained[i]) out.push_back(i);
  return out;
}

Sparse FESpace::extension() const {
  const auto dofs = free_dofs();
  Sparse e(ndof, static_cast<int>(dofs.size()));
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t j = 0; j < dofs.size(); ++j) trips.emplace_back(dofs[j], static_cast<int>(j), 1.0);
  e.setFromTriplets(trips.begin(), trips.end());
  return e;
}

FESpace build_space(std::shared_ptr<const Mesh> mesh, Family family, bool dirichlet, bool zero_mean) {
  if (zero_mean && !is_scalar(family))
    throw Error(ErrorCode::IncompatibleFlags, std::string("zero-mean requires a scalar space, got ") +
                                                  to_string(family));
  if (zero_mean && dirichlet)
    throw Error(ErrorCode::IncompatibleFlags, "zero-mean and Dirichlet flags are exclusive");
  if (dirichlet && family == Family::P0)
    throw Error(ErrorCode::IncompatibleFlags, "P0 has no boundary DOFs to constrain");

  FESpace s;
  s.mesh = mesh;
  s.family = family;
  s.dirichlet = dirichlet;
  s.zero_mean = zero_mean;
  const Mesh& m = *mesh;
  auto add = [&](int entity, int component, bool on_boundary) {
    s.dof_entity.push_back(entity);
    s.dof_component.push_back(component);
    s.constrained.push_back(dirichlet && on_boundary);
  };
  switch (family) {
    case Family::P0:
      for (int t = 0; t < m.num_triangles(); ++t) add(t, 0, false);
      break;
    case Family::P1:
      for (int v = 0; v < m.num_vertices(); ++v) add(v, 0, m.boundary_vertex[v]);
      break;
    case Family::P1Vector:
      for (int c = 0; c < 2; ++c)
        for (int v = 0; v < m.num_vertices(); ++v) add(v, c, m.boundary_vertex[v]);
      break;
    case Family::P2Vector:
      // Edge nodes carry entity index num_vertices + edge.
      for (int c = 0; c < 2; ++c) {
        for (int v = 0; v < m.num_vertices(); ++v) add(v, c, m.boundary_vertex[v]);
        for (int e = 0; e < m.num_edges(); ++e) add(m.num_vertices() + e, c, m.boundary_edge[e]);
      }
      break;
    case Family::RT0:
      for (int e = 0; e < m.num_edges(); ++e) add(e, 0, m.boundary_edge[e]);
      break;
  }
  s.ndof = static_cast<int>(s.dof_entity.size());
  return s;
}

const std::vector<QuadraturePoint>& triangle_quadrature() {
  static const std::vector<QuadraturePoint> rule = [] {
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    std::vector<QuadraturePoint> r;
    for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
      const double b = 1.0 - 2.0 * a;
      r.push_back({Eigen::Vector3d(b, a, a), w});
      r.push_back({Eigen::Vector3d(a, b, a), w});
      r.push_back({Eigen::Vector3d(a, a, b), w});
    }
    return r;
  }();
  return rule;
}

namespace {

// Values of every local basis function of one space at one point.
struct LocalValues {
  std::vector<int> dofs;
  std::vector<double> value;                // scalar families
  std::vector<Eigen::Vector2d> vec;         // vector families
  std::vector<Eigen::Vector2d> grad;        // scalar families
  std::vector<Eigen::Matrix2d> jac;         // vector families: jac(c, d) = ∂_d u_c
  std::vector<double> div;                  // vector families
};

struct Geometry {
  std::array<Eigen::Vector2d, 3> x;
  std::array<Eigen::Vector2d, 3> grad_lambda;
  double area;
};

Geometry geometry(const Mesh& m, int t) {
  Geometry g;
  const auto& tri = m.triangles[t];
  for (int i = 0; i < 3; ++i) g.x[i] = m.vertices[tri[i]];
  g.area = m.signed_area(t);
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d& xj = g.x[(i + 1) % 3];
    const Eigen::Vector2d& xk = g.x[(i + 2) % 3];
    g.grad_lambda[i] = Eigen::Vector2d(xj.y() - xk.y(), xk.x() - xj.x()) / (2.0 * g.area);
  }
  return g;
}

void push_vector(LocalValues& lv, int dof, const Eigen::Vector2d& v, const Eigen::Matrix2d& j) {
  lv.dofs.push_back(dof);
  lv.vec.push_back(v);
  lv.jac.push_back(j);
  lv.div.push_back(j.trace());
}

LocalValues evaluate(const FESpace& s, int t, const Geometry& g, const Eigen::Vector3d& lam) {
  const Mesh& m = *s.mesh;
  const auto& tri = m.triangles[t];
  LocalValues lv;
  switch (s.family) {
    case Family::P0:
      lv.dofs.push_back(t);
      lv.value.push_back(1.0);
      lv.grad.push_back(Eigen::Vector2d::Zero());
      break;
    case Family::P1:
      for (int i = 0; i < 3; ++i) {
        lv.dofs.push_back(tri[i]);
        lv.value.push_back(lam[i]);
        lv.grad.push_back(g.grad_lambda[i]);
      }
      break;
    case Family::P1Vector: {
      const int nv = m.num_vertices();
      for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 3; ++i) {
          Eigen::Vector2d v = Eigen::Vector2d::Zero();
          v[c] = lam[i];
          Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
          j.row(c) = g.grad_lambda[i].transpose();
          push_vector(lv, c * nv + tri[i], v, j);
        }
      break;
    }
    case Family::P2Vector: {
      const int nodes = m.num_vertices() + m.num_edges();
      std::array<int, 6> node;
      std::array<double, 6> phi;
      std::array<Eigen::Vector2d, 6> dphi;
      for (int i = 0; i < 3; ++i) {
        node[i] = tri[i];
        phi[i] = lam[i] * (2.0 * lam[i] - 1.0);
        dphi[i] = (4.0 * lam[i] - 1.0) * g.grad_lambda[i];
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        node[3 + i] = m.num_vertices() + m.triangle_edges[t][i];
        phi[3 + i] = 4.0 * lam[j] * lam[k];
        dphi[3 + i] = 4.0 * (lam[j] * g.grad_lambda[k] + lam[k] * g.grad_lambda[j]);
      }
      for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 6; ++a) {
          Eigen::Vector2d v = Eigen::Vector2d::Zero();
          v[c] = phi[a];
          Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
          j.row(c) = dphi[a].transpose();
          push_vector(lv, c * nodes + node[a], v, j);
        }
      break;
    }
    case Family::RT0: {
      Eigen::Vector2d x = Eigen::Vector2d::Zero();
      for (int i = 0; i < 3; ++i) x += lam[i] * g.x[i];
      for (int i = 0; i < 3; ++i) {
        const int e = m.triangle_edges[t][i];
        const double sign = m.edge_normal(e).dot(m.edge_midpoint(e) - g.x[i]) > 0 ? 1.0 : -1.0;
        const double c = sign * m.edge_length(e) / (2.0 * g.area);
        push_vector(lv, e, c * (x - g.x[i]), c * Eigen::Matrix2d::Identity());
      }
      break;
    }
  }
  return lv;
}

void check_kind(FormKind kind, const FESpace& trial, const FESpace& test) {
  const bool ts = is_scalar(trial.family), ws = is_scalar(test.family);
  bool ok = true;
  switch (kind) {
    case FormKind::Mass:
    case FormKind::GradGradScalar:
      ok = ts && ws;
      break;
    case FormKind::Stiffness:
      ok = ts == ws && trial.family != Family::RT0 && test.family != Family::RT0;
      break;
    case FormKind::VectorMass:
    case FormKind::DivDiv:
      ok = !ts && !ws;
      break;
    case FormKind::EpsEps:
      ok = !ts && !ws && trial.family != Family::RT0 && test.family != Family::RT0;
      break;
    case FormKind::DivCoupling:
      ok = !ts && ws;
      break;
  }
  if (!ok)
    throw Error(ErrorCode::IncompatibleSpaces, std::string("form kind incompatible with ") +
                                                   to_string(trial.family) + " x " +
                                                   to_string(test.family));
}

double integrand(FormKind kind, const LocalValues& u, int a, const LocalValues& w, int b,
                 bool scalar) {
  switch (kind) {
    case FormKind::Mass: return u.value[a] * w.value[b];
    case FormKind::GradGradScalar: return u.grad[a].dot(w.grad[b]);
    case FormKind::Stiffness:
      return scalar ? u.grad[a].dot(w.grad[b]) : (u.jac[a].array() * w.jac[b].array()).sum();
    case FormKind::VectorMass: return u.vec[a].dot(w.vec[b]);
    case FormKind::DivDiv: return u.div[a] * w.div[b];
    case FormKind::EpsEps: {
      const Eigen::Matrix2d eu = 0.5 * (u.jac[a] + u.jac[a].transpose());
      const Eigen::Matrix2d ew = 0.5 * (w.jac[b] + w.jac[b].transpose());
      return (eu.array() * ew.array()).sum();
    }
    case FormKind::DivCoupling: return u.div[a] * w.value[b];
  }
  return 0.0;
}

}  // namespace

Sparse assemble(const FormSpec& form) {
  if (form.trial == nullptr) throw Error(ErrorCode::IncompatibleSpaces, "form has no trial space");
  const FESpace& trial = *form.trial;
  const FESpace& test = form.test ? *form.test : trial;
  if (trial.mesh != test.mesh)
    throw Error(ErrorCode::IncompatibleSpaces, "trial and test spaces live on different meshes");
  check_kind(form.kind, trial, test);
  const Mesh& m = *trial.mesh;
  const bool scalar = is_scalar(trial.family);

  std::vector<Eigen::Triplet<double>> trips;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Geometry g = geometry(m, t);
    for (const auto& qp : triangle_quadrature()) {
      const LocalValues u = evaluate(trial, t, g, qp.barycentric);
      const LocalValues w = evaluate(test, t, g, qp.barycentric);
      const double jw = qp.weight * g.area * form.coefficient;
      for (std::size_t b = 0; b < w.dofs.size(); ++b)
        for (std::size_t a = 0; a < u.dofs.size(); ++a) {
          const double v = integrand(form.kind, u, static_cast<int>(a), w, static_cast<int>(b), scalar);
          if (v != 0.0) trips.emplace_back(w.dofs[b], u.dofs[a], jw * v);
        }
    }
  }
  Sparse out(test.ndof, trial.ndof);
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  if (&trial == &test || form.test == nullptr) {
    // Symmetric kinds: remove quadrature round-off asymmetry at the 1e-16 level.
    Sparse sym = 0.5 * (out + Sparse(out.transpose()));
    return sym;
  }
  return out;
}

Sparse assemble(FormKind kind, const FESpace& space, double coefficient) {
  return assemble(FormSpec{kind, coefficient, &space, &space});
}

Sparse apply_essential_bc(const Sparse& m, const FESpace& test, const FESpace& trial) {
  if (m.rows() != test.ndof || m.cols() != trial.ndof)
    throw Error(ErrorCode::DimensionMismatch, "matrix does not match space sizes");
  const Sparse er = test.extension();
  const Sparse ec = trial.extension();
  Sparse out = Sparse(er.transpose()) * m * ec;
  out.makeCompressed();
  return out;
}

Sparse apply_essential_bc(const Sparse& m, const FESpace& space) {
  return apply_essential_bc(m, space, space);
}

Matrix mean_metric(const FESpace& space) {
  if (!is_scalar(space.family))
    throw Error(ErrorCode::IncompatibleFlags, "mean metric needs a scalar space");
  const Matrix mass = to_dense(assemble(FormKind::Mass, space));
  const Vector m1 = mass * Vector::Ones(space.ndof);
  return m1 * m1.transpose() / m1.sum();
}

Sparse mean_zero_projector(const FESpace& space) {
  if (!is_scalar(space.family))
    throw Error(ErrorCode::IncompatibleFlags, "mean-zero projector needs a scalar space");
  const Matrix mass = to_dense(assemble(FormKind::Mass, space));
  const Vector m1 = mass * Vector::Ones(space.ndof);
  Matrix pi = Matrix::Identity(space.ndof, space.ndof) -
              Vector::Ones(space.ndof) * m1.transpose() / m1.sum();
  return to_sparse(pi);
}

Vector interpolate_p1(const FESpace& space, double (*f)(const Eigen::Vector2d&)) {
  if (space.family != Family::P1)
    throw Error(ErrorCode::IncompatibleSpaces, "P1 interpolation on a non-P1 space");
  Vector out(space.ndof);
  for (int i = 0; i < space.ndof; ++i) out(i) = f(space.mesh->vertices[space.dof_entity[i]]);
  return out;
}

}  // namespace saddlecheck
