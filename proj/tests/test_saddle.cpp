#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "saddlecheck/saddle.hpp"

using namespace saddlecheck;

namespace {

using System = BlockSystem<double>;
using Norms = FittedNorms<double>;
using Combined = CombinedVector<double>;

Sparse sp(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return to_sparse(m);
}

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }

System scalar_system(double t) { return System{sp({{1}}), sp({{1}}), sp({{t}}), {}, {}}; }

// Random system with PSD A, C, a full-rank B and SPD seminorms.
struct RandomCase {
  System sys;
  Matrix s_q, s_v;
};

RandomCase random_case(std::mt19937_64& rng, int nv, int nq) {
  const Matrix ga = oracle::random_matrix(rng, nv, nv - 1);
  const Matrix gc = oracle::random_matrix(rng, nq, nq / 2);
  RandomCase rc;
  rc.sys.A = to_sparse(Matrix(ga * ga.transpose()));
  rc.sys.B = to_sparse(oracle::random_matrix(rng, nq, nv));
  rc.sys.C = to_sparse(Matrix(gc * gc.transpose()));
  rc.s_q = oracle::random_spd(rng, nq);
  rc.s_v = oracle::random_spd(rng, nv);
  return rc;
}

Vector random_vec(std::mt19937_64& rng, int n) { return oracle::random_vector(rng, n); }

}  // namespace

TEST_CASE("scalar fitted norms by hand") {
  const Norms n0 = build_fitted_norms(scalar_system(0), m1(1), m1(1));
  CHECK(n0.Qbar(0, 0) == doctest::Approx(1.0));
  CHECK(n0.Vbar(0, 0) == doctest::Approx(2.0));
  const Matrix big = n0.combined_metric();
  CHECK(big(0, 0) == doctest::Approx(2.0));
  CHECK(big(1, 1) == doctest::Approx(1.0));
  CHECK(big(0, 1) == 0.0);

  const Norms n1 = build_fitted_norms(scalar_system(1), m1(1), m1(1));
  CHECK(n1.Qbar(0, 0) == doctest::Approx(2.0));
  CHECK(n1.Vbar(0, 0) == doctest::Approx(1.5));
}

TEST_CASE("trivial splitting gives Qbar = C") {
  System sys{sp({{1, 0}, {0, 1}}), sp({{1, 1}}), sp({{3}}), {}, {}};
  const Norms n = build_fitted_norms(sys, m1(0), Matrix(Matrix::Identity(2, 2)));
  CHECK(n.Qbar(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("singular Qbar is reported") {
  try {
    build_fitted_norms(scalar_system(0), m1(0), m1(1));
    FAIL("expected QbarSingular");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::QbarSingular);
  }
}

TEST_CASE("validation of block shapes and seminorms") {
  System bad{sp({{1, 0}, {0, 1}}), sp({{1}}), sp({{1}}), {}, {}};
  CHECK_THROWS_AS(validate(bad), Error);
  System asym{sp({{1, 2}, {0, 1}}), sp({{1, 1}}), sp({{1}}), {}, {}};
  CHECK_THROWS_AS(validate(asym), Error);
  CHECK_THROWS_AS(build_fitted_norms(scalar_system(0), Matrix(Matrix::Identity(2, 2)), m1(1)), Error);
}

TEST_CASE("block operator examples") {
  const System sys{sp({{1}}), sp({{1}}), sp({{1}}), {}, {}};
  const Combined y = apply_block_operator(sys, Combined{Vector::Ones(1), Vector::Ones(1)});
  CHECK(y.u(0) == doctest::Approx(2.0));
  CHECK(y.p(0) == doctest::Approx(0.0));
  const Combined z = apply_block_operator(sys, Combined{Vector::Zero(1), Vector::Zero(1)});
  CHECK(z.stacked().norm() == 0.0);

  System c0{sp({{1, 0}, {0, 1}}), sp({{2, 3}}), sp({{0}}), {}, {}};
  const Combined w = apply_block_operator(c0, Combined{Vector::Zero(2), Vector::Constant(1, 5.0)});
  CHECK(w.u(0) == doctest::Approx(10.0));
  CHECK(w.u(1) == doctest::Approx(15.0));
  CHECK(w.p(0) == 0.0);
  CHECK_THROWS_AS(apply_block_operator(c0, Combined{Vector::Zero(1), Vector::Zero(1)}), Error);
}

TEST_CASE("block operator is symmetric and matches the dense form") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const RandomCase rc = random_case(rng, 9, 4);
    const Matrix dense = block_operator_dense(rc.sys);
    CHECK(is_symmetric(dense));
    const Combined x{random_vec(rng, 9), random_vec(rng, 4)};
    const Combined y{random_vec(rng, 9), random_vec(rng, 4)};
    CHECK(bilinear_form(rc.sys, x, y) == doctest::Approx(bilinear_form(rc.sys, y, x)).epsilon(1e-12));
    CHECK((apply_block_operator(rc.sys, x).stacked() - dense * x.stacked()).norm() <= 1e-12 * dense.norm());
  }
}

TEST_CASE("combined norm") {
  const Norms n = build_fitted_norms(scalar_system(0), m1(1), m1(1));
  CHECK(combined_norm(n, Combined{Vector::Zero(1), Vector::Zero(1)}) == 0.0);
  const Combined x{Vector::Ones(1), Vector::Zero(1)};
  CHECK(combined_norm(n, x) == doctest::Approx(std::sqrt(2.0)));
  const Combined z{Vector::Constant(1, 0.3), Vector::Constant(1, -1.7)};
  CHECK(combined_norm(n, 2.0 * z) == doctest::Approx(2.0 * combined_norm(n, z)));
  CHECK_THROWS_AS(combined_norm(n, Combined{Vector::Zero(2), Vector::Zero(1)}), Error);
}

TEST_CASE("fitted norm invariants on random systems") {
  std::mt19937_64 rng(32);
  for (auto [nv, nq] : {std::pair{6, 3}, std::pair{12, 5}, std::pair{20, 20}}) {
    const RandomCase rc = random_case(rng, nv, nq);
    const Norms n = build_fitted_norms(rc.sys, rc.s_q, rc.s_v);
    CHECK(is_spd(n.Qbar));
    CHECK(is_spd(n.Vbar));
    CHECK(is_psd(Matrix(n.Vbar - n.S_V)));
    CHECK(is_symmetric(n.Vbar));

    // Independent reconstruction through a plain inverse.
    const Matrix b = to_dense(rc.sys.B);
    const Matrix vbar = rc.s_v + b.transpose() * n.Qbar.inverse() * b;
    CHECK(max_abs(Matrix(vbar - n.Vbar)) <= 1e-10 * max_abs(vbar));

    const Matrix qinv = n.Qbar.inverse();
    const Matrix c = to_dense(rc.sys.C);
    for (int k = 0; k < 50; ++k) {
      const Vector v = random_vec(rng, nv), p = random_vec(rng, nq), q = random_vec(rng, nq);
      const Vector bv = b * v;
      // |Bv|²_{Qbar⁻¹} ≤ |v|²_Vbar
      CHECK(bv.dot(qinv * bv) <= v.dot(n.Vbar * v) * (1 + 1e-12));
      // b and c are continuous with constant 1.
      CHECK(std::abs(bv.dot(q)) <= v_norm(n, v) * q_norm(n, q) * (1 + 1e-12));
      CHECK(std::abs(p.dot(c * q)) <= q_norm(n, p) * q_norm(n, q) * (1 + 1e-12));
      CHECK(q_seminorm(n, q) <= q_norm(n, q) * (1 + 1e-14));
    }
  }
}

TEST_CASE("taking S_V = A gives Vbar above A") {
  std::mt19937_64 rng(33);
  RandomCase rc = random_case(rng, 8, 3);
  const Matrix a = to_dense(rc.sys.A) + Matrix::Identity(8, 8);
  rc.sys.A = to_sparse(a);
  const Norms n = build_fitted_norms(rc.sys, rc.s_q, a);
  CHECK(is_psd(Matrix(n.Vbar - a)));
  CHECK(gen_sym_eig<double>(a, n.S_V).min() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("replacing metrics") {
  Norms n = build_fitted_norms(scalar_system(0), m1(1), m1(1));
  n.replace_metrics(m1(4), m1(9));
  CHECK(q_norm(n, Vector(Vector::Ones(1))) == doctest::Approx(2.0));
  CHECK(v_norm(n, Vector(Vector::Ones(1))) == doctest::Approx(3.0));
  CHECK(n.Vbar_factor.solve_vector(Vector::Ones(1))(0) == doctest::Approx(1.0 / 9));
  CHECK_THROWS_AS(n.replace_metrics(Matrix(Matrix::Identity(2, 2)), m1(1)), Error);
}
