#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>

#include "saddlecheck/fem.hpp"

using namespace saddlecheck;

namespace {

std::shared_ptr<const Mesh> mesh_of(int n) { return std::make_shared<const Mesh>(build_unit_square_mesh(n)); }

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

int rank_of(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > 1e-10 * s(0);
  return r;
}

int kernel_dim(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  int k = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) k += std::abs(es.eigenvalues()(i)) <= 1e-10 * top;
  return k;
}

// Nodal interpolant of a vector field on P2-vector: vertices, then edge midpoints.
Vector interpolate_p2v(const FESpace& s, const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f) {
  const Mesh& m = *s.mesh;
  Vector out(s.ndof);
  for (int i = 0; i < s.ndof; ++i) {
    const int ent = s.dof_entity[i];
    const Eigen::Vector2d x = ent < m.num_vertices() ? m.vertices[ent] : m.edge_midpoint(ent - m.num_vertices());
    out(i) = f(x)[s.dof_component[i]];
  }
  return out;
}

double fact(int k) { return k <= 1 ? 1.0 : k * fact(k - 1); }

}  // namespace

TEST_CASE("space sizes and Dirichlet masks") {
  const auto m2 = mesh_of(2);
  const FESpace p1 = build_space(m2, Family::P1, true);
  CHECK(p1.ndof == 9);
  CHECK(p1.num_constrained() == 8);
  const FESpace rt = build_space(m2, Family::RT0, true);
  CHECK(rt.ndof == 16);
  CHECK(rt.num_constrained() == 8);
  const FESpace p0 = build_space(mesh_of(1), Family::P0, false, true);
  CHECK(p0.ndof == 2);
  CHECK(p0.zero_mean);

  for (int n : {1, 3, 5}) {
    const auto m = mesh_of(n);
    CHECK(build_space(m, Family::P2Vector).ndof == 2 * (m->num_vertices() + m->num_edges()));
    CHECK(build_space(m, Family::P1Vector).ndof == 2 * m->num_vertices());
    CHECK(build_space(m, Family::P0).ndof == m->num_triangles());
    const FESpace v = build_space(m, Family::P2Vector, true);
    for (int i = 0; i < v.ndof; ++i) {
      if (!v.constrained[i]) continue;
      const int ent = v.dof_entity[i];
      CHECK((ent < m->num_vertices() ? m->boundary_vertex[ent] : m->boundary_edge[ent - m->num_vertices()]));
    }
    const auto free = v.free_dofs();
    CHECK(static_cast<int>(free.size()) == v.num_free());
    CHECK(std::is_sorted(free.begin(), free.end()));
  }
}

TEST_CASE("incompatible flags") {
  const auto m = mesh_of(2);
  CHECK(code_of([&] { build_space(m, Family::P2Vector, false, true); }) == ErrorCode::IncompatibleFlags);
  CHECK(code_of([&] { build_space(m, Family::RT0, false, true); }) == ErrorCode::IncompatibleFlags);
  CHECK(code_of([&] { build_space(m, Family::P0, true, false); }) == ErrorCode::IncompatibleFlags);
}

TEST_CASE("incompatible form spaces") {
  const auto m = mesh_of(2);
  const FESpace p0 = build_space(m, Family::P0), rt = build_space(m, Family::RT0);
  const FESpace p2 = build_space(m, Family::P2Vector);
  CHECK(code_of([&] { assemble(FormKind::EpsEps, rt); }) == ErrorCode::IncompatibleSpaces);
  CHECK(code_of([&] { assemble(FormKind::Mass, p2); }) == ErrorCode::IncompatibleSpaces);
  CHECK(code_of([&] { assemble(FormSpec{FormKind::DivCoupling, 1.0, &p0, &rt}); }) == ErrorCode::IncompatibleSpaces);
  const FESpace other = build_space(mesh_of(2), Family::P0);
  CHECK(code_of([&] { assemble(FormSpec{FormKind::DivCoupling, 1.0, &rt, &other}); }) == ErrorCode::IncompatibleSpaces);
}

TEST_CASE("P0 mass on n = 1") {
  const FESpace p0 = build_space(mesh_of(1), Family::P0);
  const Matrix m = to_dense(assemble(FormKind::Mass, p0));
  CHECK(m(0, 0) == doctest::Approx(0.5));
  CHECK(m(1, 1) == doctest::Approx(0.5));
  CHECK(m(0, 1) == 0.0);
}

TEST_CASE("quadrature is exact for degree-4 barycentric monomials") {
  // ∫_T λ1^a λ2^b λ3^c = 2|T| a! b! c! / (a+b+c+2)!
  const auto& rule = triangle_quadrature();
  double wsum = 0;
  for (const auto& q : rule) wsum += q.weight;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b)
      for (int c = 0; a + b + c <= 4; ++c) {
        double num = 0;
        for (const auto& q : rule)
          num += q.weight * std::pow(q.barycentric(0), a) * std::pow(q.barycentric(1), b) * std::pow(q.barycentric(2), c);
        const double exact = 2.0 * fact(a) * fact(b) * fact(c) / fact(a + b + c + 2);
        CHECK(num == doctest::Approx(exact).epsilon(1e-13));
      }
}

TEST_CASE("stiffness row sums vanish and the patch test holds") {
  for (int n : {1, 2, 5}) {
    const FESpace p1 = build_space(mesh_of(n), Family::P1);
    const Sparse k = assemble(FormKind::Stiffness, p1);
    CHECK((k * Vector::Ones(p1.ndof)).cwiseAbs().maxCoeff() <= 1e-12);
    const Vector lin = interpolate_p1(p1, [](const Eigen::Vector2d& x) { return 2.0 * x.x() - 3.0 * x.y() + 0.5; });
    const Vector r = k * lin;
    for (int i = 0; i < p1.ndof; ++i)
      if (!p1.mesh->boundary_vertex[i]) CHECK(std::abs(r(i)) <= 1e-12);
    // ‖∇ℓ‖² = 4 + 9 on the unit square.
    CHECK(lin.dot(r) == doctest::Approx(13.0).epsilon(1e-12));
  }
}

TEST_CASE("Dirichlet reduction") {
  const FESpace p1_1 = build_space(mesh_of(1), Family::P1, true);
  const Sparse k1 = apply_essential_bc(assemble(FormKind::Stiffness, p1_1), p1_1);
  CHECK(k1.rows() == 0);
  CHECK(k1.cols() == 0);

  const FESpace p1 = build_space(mesh_of(2), Family::P1, true);
  const Matrix k = to_dense(apply_essential_bc(assemble(FormKind::Stiffness, p1), p1));
  REQUIRE(k.rows() == 1);
  CHECK(k(0, 0) == doctest::Approx(4.0).epsilon(1e-13));

  const auto m = mesh_of(2);
  const FESpace rt = build_space(m, Family::RT0, true), p0 = build_space(m, Family::P0);
  const Sparse b = assemble(FormSpec{FormKind::DivCoupling, 1.0, &rt, &p0});
  const Sparse rb = apply_essential_bc(b, p0, rt);
  CHECK(rb.rows() == p0.ndof);
  CHECK(rb.cols() == rt.num_free());
  CHECK_THROWS_AS(apply_essential_bc(b, rt, p0), Error);
}

TEST_CASE("RT0 divergence coupling matches the divergence theorem per element") {
  for (int n : {1, 3}) {
    const auto m = mesh_of(n);
    const FESpace rt = build_space(m, Family::RT0), p0 = build_space(m, Family::P0);
    const Matrix b = to_dense(assemble(FormSpec{FormKind::DivCoupling, 1.0, &rt, &p0}));
    // The RT0 function of edge e has unit normal component on e along the
    // global normal, so its outward flux through ∂T is ±|e|.
    Matrix expect = Matrix::Zero(p0.ndof, rt.ndof);
    for (int t = 0; t < m->num_triangles(); ++t) {
      Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
      for (int v : m->triangles[t]) centroid += m->vertices[v] / 3.0;
      for (int e : m->triangle_edges[t]) {
        const double out = m->edge_normal(e).dot(m->edge_midpoint(e) - centroid) > 0 ? 1.0 : -1.0;
        expect(t, e) = out * m->edge_length(e);
      }
    }
    CHECK(max_abs(Matrix(b - expect)) <= 1e-13);
  }
}

TEST_CASE("RT0 divergence is onto mean-zero P0 under Dirichlet conditions") {
  for (int n : {2, 4}) {
    const auto m = mesh_of(n);
    const FESpace rt = build_space(m, Family::RT0, true), p0 = build_space(m, Family::P0);
    const Matrix b = to_dense(apply_essential_bc(assemble(FormSpec{FormKind::DivCoupling, 1.0, &rt, &p0}), p0, rt));
    CHECK(rank_of(b) == p0.ndof - 1);
    CHECK((b.transpose() * Vector::Ones(p0.ndof)).norm() <= 1e-12);
  }
}

TEST_CASE("eps_eps kernel is the rigid motions") {
  for (int n : {1, 2}) {
    const FESpace v = build_space(mesh_of(n), Family::P2Vector);
    const Matrix e = to_dense(assemble(FormKind::EpsEps, v));
    CHECK(is_psd(e));
    CHECK(kernel_dim(e) == 3);
    const Vector rot = interpolate_p2v(v, [](const Eigen::Vector2d& x) { return Eigen::Vector2d(-x.y(), x.x()); });
    CHECK((e * rot).norm() <= 1e-12);
    const FESpace vd = build_space(mesh_of(n + 1), Family::P2Vector, true);
    const Matrix ed = to_dense(apply_essential_bc(assemble(FormKind::EpsEps, vd), vd));
    CHECK(kernel_dim(ed) == 0);
  }
}

TEST_CASE("forms integrate quadratic fields exactly") {
  const FESpace v = build_space(mesh_of(3), Family::P2Vector);
  const Vector u = interpolate_p2v(v, [](const Eigen::Vector2d& x) { return Eigen::Vector2d(x.x() * x.x(), x.x() * x.y()); });
  // ∇u = [[2x, 0], [y, x]], div u = 3x, ε(u) = [[2x, y/2], [y/2, x]].
  auto energy = [&](FormKind k) { return u.dot(assemble(k, v) * u); };
  CHECK(energy(FormKind::Stiffness) == doctest::Approx(4.0 / 3 + 1.0 / 3 + 1.0 / 3).epsilon(1e-12));
  CHECK(energy(FormKind::DivDiv) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(energy(FormKind::EpsEps) == doctest::Approx(4.0 / 3 + 2 * 1.0 / 12 + 1.0 / 3).epsilon(1e-12));
  // ∫ x⁴ + x²y² = 1/5 + 1/9
  CHECK(energy(FormKind::VectorMass) == doctest::Approx(1.0 / 5 + 1.0 / 9).epsilon(1e-12));
}

TEST_CASE("mass matrices integrate to the domain area") {
  const auto m = mesh_of(3);
  for (Family f : {Family::P0, Family::P1}) {
    const FESpace s = build_space(m, f);
    const Sparse mass = assemble(FormKind::Mass, s);
    CHECK(Vector::Ones(s.ndof).dot(mass * Vector::Ones(s.ndof)) == doctest::Approx(1.0).epsilon(1e-13));
  }
  const FESpace s = build_space(m, Family::P1);
  const Sparse c = assemble(FormKind::Mass, s, 2.5);
  CHECK(Vector::Ones(s.ndof).dot(c * Vector::Ones(s.ndof)) == doctest::Approx(2.5).epsilon(1e-13));
}

TEST_CASE("symmetric kinds pass the symmetry check") {
  const auto m = mesh_of(3);
  const FESpace p0 = build_space(m, Family::P0), p1 = build_space(m, Family::P1);
  const FESpace p2 = build_space(m, Family::P2Vector), rt = build_space(m, Family::RT0);
  const FESpace p1v = build_space(m, Family::P1Vector);
  CHECK(is_symmetric(assemble(FormKind::Mass, p0)));
  CHECK(is_symmetric(assemble(FormKind::Mass, p1)));
  CHECK(is_symmetric(assemble(FormKind::Stiffness, p1)));
  CHECK(is_symmetric(assemble(FormKind::GradGradScalar, p1)));
  for (const FESpace* s : {&p2, &p1v}) {
    CHECK(is_symmetric(assemble(FormKind::Stiffness, *s)));
    CHECK(is_symmetric(assemble(FormKind::EpsEps, *s)));
  }
  for (const FESpace* s : {&p2, &rt, &p1v}) {
    CHECK(is_symmetric(assemble(FormKind::DivDiv, *s)));
    CHECK(is_symmetric(assemble(FormKind::VectorMass, *s)));
  }
}

TEST_CASE("mean-zero projector") {
  const FESpace p0 = build_space(mesh_of(1), Family::P0);
  const Matrix pi = to_dense(mean_zero_projector(p0));
  const Vector y = pi * Vector(Eigen::Vector2d(1, 0));
  CHECK(y(0) == doctest::Approx(0.5));
  CHECK(y(1) == doctest::Approx(-0.5));

  for (Family f : {Family::P0, Family::P1}) {
    const FESpace s = build_space(mesh_of(3), f);
    const Matrix p = to_dense(mean_zero_projector(s));
    const Matrix mass = to_dense(assemble(FormKind::Mass, s));
    CHECK((p * Vector::Ones(s.ndof)).norm() <= 1e-13);
    CHECK(max_abs(Matrix(p * p - p)) <= 1e-12);
    CHECK(is_symmetric(Matrix(mass * p)));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal;
    Vector q(s.ndof);
    for (auto& x : q) x = normal(rng);
    const Vector q0 = p * q;
    CHECK((p * q0 - q0).norm() <= 1e-12 * q0.norm());
    CHECK(std::abs(Vector::Ones(s.ndof).dot(mass * q0)) <= 1e-13);
    CHECK(max_abs(Matrix(p.transpose() * mass * p + mean_metric(s) - mass)) <= 1e-13);
  }
  const FESpace v = build_space(mesh_of(2), Family::P2Vector);
  CHECK(code_of([&] { mean_zero_projector(v); }) == ErrorCode::IncompatibleFlags);
}
