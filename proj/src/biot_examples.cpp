#include "saddlecheck/biot_examples.hpp"

#include <cmath>
#include <cstdio>
#include <map>

namespace saddlecheck {

namespace {

using Member = double ExampleParams::*;

const std::vector<std::pair<std::string, Member>>& member_table() {
  static const std::vector<std::pair<std::string, Member>> table = {
      {"t", &ExampleParams::t},
      {"kappa", &ExampleParams::kappa},
      {"lambda", &ExampleParams::lambda},
      {"mu", &ExampleParams::mu},
      {"c0", &ExampleParams::c0},
      {"alpha_bw", &ExampleParams::alpha_bw},
      {"tau", &ExampleParams::tau},
      {"eta", &ExampleParams::eta},
      {"lambda_mu", &ExampleParams::lambda_mu},
      {"R_p", &ExampleParams::R_p},
      {"alpha_p", &ExampleParams::alpha_p},
  };
  return table;
}

Member find_member(const std::string& name) {
  for (const auto& [key, member] : member_table())
    if (key == name) return member;
  throw Error(ErrorCode::ValidationError, "unknown parameter '" + name + "'");
}

bool close(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

// Places sparse and dense pieces into a block matrix with given block sizes.
class BlockAssembler {
 public:
  BlockAssembler(std::vector<int> rows, std::vector<int> cols)
      : row_off_(offsets(rows)), col_off_(offsets(cols)) {}

  void add(int bi, int bj, const Sparse& m, double scale = 1.0) {
    for (int k = 0; k < m.outerSize(); ++k)
      for (Sparse::InnerIterator it(m, k); it; ++it)
        trips_.emplace_back(row_off_[bi] + it.row(), col_off_[bj] + it.col(), scale * it.value());
  }

  void add(int bi, int bj, const Matrix& m, double scale = 1.0) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (m(i, j) != 0.0) trips_.emplace_back(row_off_[bi] + i, col_off_[bj] + j, scale * m(i, j));
  }

  Sparse sparse() const {
    Sparse out(row_off_.back(), col_off_.back());
    out.setFromTriplets(trips_.begin(), trips_.end());
    out.makeCompressed();
    return out;
  }

  Matrix dense() const { return to_dense(sparse()); }

 private:
  static std::vector<int> offsets(const std::vector<int>& sizes) {
    std::vector<int> off{0};
    for (int s : sizes) off.push_back(off.back() + s);
    return off;
  }

  std::vector<int> row_off_, col_off_;
  std::vector<Eigen::Triplet<double>> trips_;
};

Sparse reduced(FormKind kind, const FESpace& space, double coef = 1.0) {
  return apply_essential_bc(assemble(kind, space, coef), space);
}

Sparse reduced(FormKind kind, const FESpace& trial, const FESpace& test, double coef = 1.0) {
  return apply_essential_bc(assemble(FormSpec{kind, coef, &trial, &test}), test, trial);
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Π₀ᵀ M Π₀ on a scalar space without boundary constraints.
Matrix zero_mean_mass(const FESpace& space) {
  const Matrix pi = to_dense(mean_zero_projector(space));
  const Matrix mass = to_dense(assemble(FormKind::Mass, space));
  return symmetrized(pi.transpose() * mass * pi);
}

std::shared_ptr<const Mesh> make_mesh(int n) {
  return std::make_shared<const Mesh>(build_unit_square_mesh(n));
}

BlockLayout layout_of(const std::vector<std::string>& names, const std::vector<FESpace>& spaces) {
  BlockLayout out;
  for (std::size_t i = 0; i < spaces.size(); ++i) out.blocks.emplace_back(names[i], spaces[i].num_free());
  return out;
}

void finish(DiscreteProblem& dp, const Matrix& s_q, const Matrix& s_v) {
  dp.norms = build_fitted_norms(dp.system, s_q, s_v);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::ValidationError, what);
}

}  // namespace

double ExampleParams::eta_value() const {
  return eta > 0 ? eta : alpha_bw * alpha_bw / (1.0 + lambda);
}

ExampleParams& ExampleParams::derive() {
  lambda_mu = lambda / (2.0 * mu);
  R_p = tau * kappa / (alpha_bw * alpha_bw);
  alpha_p = c0 / (alpha_bw * alpha_bw);
  return *this;
}

bool ExampleParams::derived_consistent(double rel_tol) const {
  ExampleParams d = *this;
  d.derive();
  return close(d.lambda_mu, lambda_mu, rel_tol) && close(d.R_p, R_p, rel_tol) &&
         close(d.alpha_p, alpha_p, rel_tol);
}

double ExampleParams::get(const std::string& name) const { return this->*find_member(name); }

void ExampleParams::set(const std::string& name, double value) { this->*find_member(name) = value; }

const std::vector<std::string>& ExampleParams::field_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& entry : member_table()) out.push_back(entry.first);
    return out;
  }();
  return names;
}

const std::vector<std::string>& example_parameters(int example_id) {
  static const std::map<int, std::vector<std::string>> table = {
      {1, {"t"}},
      {2, {"kappa"}},
      {3, {"lambda", "c0", "kappa", "alpha_bw", "eta"}},
      {4, {"lambda", "c0", "kappa"}},
      {5, {"lambda", "c0", "kappa", "alpha_bw"}},
      {6, {"mu", "lambda", "kappa", "c0", "tau", "alpha_bw"}},
      {7, {"lambda_mu", "R_p", "alpha_p"}},
  };
  const auto it = table.find(example_id);
  if (it == table.end())
    throw Error(ErrorCode::ValidationError, "example id must be 1..7, got " + std::to_string(example_id));
  return it->second;
}

void validate_params(int example_id, const ExampleParams& p) {
  example_parameters(example_id);
  auto nonneg = [](double v, const char* name) {
    require(std::isfinite(v) && v >= 0, std::string(name) + " must be nonnegative");
  };
  auto pos = [](double v, const char* name) {
    require(std::isfinite(v) && v > 0, std::string(name) + " must be positive");
  };
  switch (example_id) {
    case 1: nonneg(p.t, "t"); break;
    case 2: nonneg(p.kappa, "kappa"); break;
    case 3:
      nonneg(p.lambda, "lambda");
      nonneg(p.c0, "c0");
      nonneg(p.kappa, "kappa");
      pos(p.alpha_bw, "alpha_bw");
      nonneg(p.eta, "eta");
      break;
    case 4:
      pos(p.lambda, "lambda");
      nonneg(p.c0, "c0");
      nonneg(p.kappa, "kappa");
      break;
    case 5:
      pos(p.lambda, "lambda");
      nonneg(p.c0, "c0");
      nonneg(p.kappa, "kappa");
      nonneg(p.alpha_bw, "alpha_bw");
      break;
    case 6:
      pos(p.mu, "mu");
      pos(p.lambda, "lambda");
      pos(p.tau, "tau");
      pos(p.kappa, "kappa");
      nonneg(p.c0, "c0");
      nonneg(p.alpha_bw, "alpha_bw");
      break;
    case 7:
      nonneg(p.lambda_mu, "lambda_mu");
      pos(p.R_p, "R_p");
      nonneg(p.alpha_p, "alpha_p");
      break;
  }
}

DiscreteProblem build_example1(int n, double t) {
  ExampleParams params;
  params.t = t;
  validate_params(1, params);
  DiscreteProblem dp;
  dp.example_id = 1;
  dp.level = n;
  dp.params = params;
  dp.mesh = make_mesh(n);
  // Full H(div): with zero normal trace the constant pressure would be
  // invisible to div and the small inf-sup constant would vanish.
  dp.v_spaces = {build_space(dp.mesh, Family::RT0)};
  dp.q_spaces = {build_space(dp.mesh, Family::P0)};
  const FESpace& rt = dp.v_spaces[0];
  const FESpace& p0 = dp.q_spaces[0];

  const Sparse mass_v = reduced(FormKind::VectorMass, rt);
  const Sparse mass_q = reduced(FormKind::Mass, p0);
  dp.system.A = mass_v;
  dp.system.B = reduced(FormKind::DivCoupling, rt, p0);
  dp.system.C = t * mass_q;
  dp.system.v_layout = layout_of({"u"}, dp.v_spaces);
  dp.system.q_layout = layout_of({"p"}, dp.q_spaces);
  dp.mean_mode = Matrix::Zero(p0.num_free(), p0.num_free());
  dp.q_mass = to_dense(mass_q);
  finish(dp, to_dense(mass_q), to_dense(mass_v));
  return dp;
}

DiscreteProblem build_example2(int n, double kappa) {
  ExampleParams params;
  params.kappa = kappa;
  validate_params(2, params);
  DiscreteProblem dp;
  dp.example_id = 2;
  dp.level = n;
  dp.params = params;
  dp.mesh = make_mesh(n);
  dp.v_spaces = {build_space(dp.mesh, Family::P2Vector, true)};
  dp.q_spaces = {build_space(dp.mesh, Family::P1, false, true)};
  const FESpace& v = dp.v_spaces[0];
  const FESpace& q = dp.q_spaces[0];

  const Matrix s_q = zero_mean_mass(q);
  // The constant pressure mode carries no seminorm and no κ-stiffness; give it
  // the seminorm's own weight so that Qbar is the full L² + κH¹ metric.
  dp.mean_mode = mean_metric(q);
  dp.system.A = reduced(FormKind::Stiffness, v);
  dp.system.B = reduced(FormKind::DivCoupling, v, q, -1.0);
  dp.system.C = to_sparse(Matrix(to_dense(reduced(FormKind::GradGradScalar, q, kappa)) + dp.mean_mode));
  dp.system.v_layout = layout_of({"u"}, dp.v_spaces);
  dp.system.q_layout = layout_of({"p"}, dp.q_spaces);
  dp.q_mass = to_dense(reduced(FormKind::Mass, q));
  finish(dp, s_q, to_dense(dp.system.A));
  return dp;
}

DiscreteProblem build_example3(int n, const ExampleParams& params) {
  validate_params(3, params);
  DiscreteProblem dp;
  dp.example_id = 3;
  dp.level = n;
  dp.params = params;
  dp.mesh = make_mesh(n);
  dp.v_spaces = {build_space(dp.mesh, Family::P2Vector, true)};
  dp.q_spaces = {build_space(dp.mesh, Family::P1, true)};
  const FESpace& v = dp.v_spaces[0];
  const FESpace& q = dp.q_spaces[0];

  const Sparse mass_q = reduced(FormKind::Mass, q);
  dp.system.A = reduced(FormKind::EpsEps, v) + reduced(FormKind::DivDiv, v, params.lambda);
  dp.system.B = reduced(FormKind::DivCoupling, v, q, -params.alpha_bw);
  dp.system.C = params.c0 * mass_q + reduced(FormKind::GradGradScalar, q, params.kappa);
  dp.system.v_layout = layout_of({"u"}, dp.v_spaces);
  dp.system.q_layout = layout_of({"p_F"}, dp.q_spaces);
  dp.mean_mode = Matrix::Zero(q.num_free(), q.num_free());
  dp.q_mass = to_dense(mass_q);
  finish(dp, params.eta_value() * dp.q_mass, to_dense(dp.system.A));
  return dp;
}

DiscreteProblem build_example4(int n, const ExampleParams& params) {
  validate_params(4, params);
  DiscreteProblem dp;
  dp.example_id = 4;
  dp.level = n;
  dp.params = params;
  dp.mesh = make_mesh(n);
  dp.v_spaces = {build_space(dp.mesh, Family::P2Vector, true)};
  dp.q_spaces = {build_space(dp.mesh, Family::P1, false, true), build_space(dp.mesh, Family::P1, true)};
  const FESpace& v = dp.v_spaces[0];
  const FESpace& qs = dp.q_spaces[0];
  const FESpace& qf = dp.q_spaces[1];
  const int ns = qs.num_free(), nf = qf.num_free();

  // |q|²_Q = ‖Π₀(q_S + q_F)‖² with q_F extended by zero to the full P1 space;
  // Π₀q_S = q_S on the zero-mean block, kept literal through L = [Π₀, Π₀E_F].
  const Matrix pi = to_dense(mean_zero_projector(qs));
  const Matrix mass_full = to_dense(assemble(FormKind::Mass, qs));
  Matrix l(qs.ndof, ns + nf);
  l << pi, pi * to_dense(qf.extension());
  const Matrix s_q = symmetrized(l.transpose() * mass_full * l);

  const Sparse mass_s = reduced(FormKind::Mass, qs);
  const Sparse mass_f = reduced(FormKind::Mass, qf);
  BlockAssembler c({ns, nf}, {ns, nf});
  c.add(0, 0, mass_s, 1.0 / params.lambda);
  c.add(1, 1, mass_f, params.c0);
  c.add(1, 1, reduced(FormKind::GradGradScalar, qf), params.kappa);
  BlockAssembler b({ns, nf}, {v.num_free()});
  b.add(0, 0, reduced(FormKind::DivCoupling, v, qs, -1.0));
  b.add(1, 0, reduced(FormKind::DivCoupling, v, qf, -1.0));
  BlockAssembler mq({ns, nf}, {ns, nf});
  mq.add(0, 0, mass_s);
  mq.add(1, 1, mass_f);

  dp.system.A = reduced(FormKind::EpsEps, v);
  dp.system.B = b.sparse();
  dp.system.C = c.sparse();
  dp.system.v_layout = layout_of({"u"}, dp.v_spaces);
  dp.system.q_layout = layout_of({"p_S", "p_F"}, dp.q_spaces);
  dp.mean_mode = Matrix::Zero(ns + nf, ns + nf);
  dp.q_mass = mq.dense();
  finish(dp, s_q, to_dense(dp.system.A));
  return dp;
}

DiscreteProblem build_example5(int n, const ExampleParams& params) {
  validate_params(5, params);
  DiscreteProblem dp;
  dp.example_id = 5;
  dp.level = n;
  dp.params = params;
  dp.mesh = make_mesh(n);
  dp.v_spaces = {build_space(dp.mesh, Family::P2Vector, true)};
  dp.q_spaces = {build_space(dp.mesh, Family::P1), build_space(dp.mesh, Family::P1, true)};
  const FESpace& v = dp.v_spaces[0];
  const FESpace& qt = dp.q_spaces[0];
  const FESpace& qf = dp.q_spaces[1];
  const int nt = qt.num_free(), nf = qf.num_free();
  const double inv_l = 1.0 / params.lambda, a = params.alpha_bw;

  const Sparse mass_full = assemble(FormKind::Mass, qt);
  const Sparse mass_t = apply_essential_bc(mass_full, qt);
  const Sparse mass_ft = apply_essential_bc(mass_full, qf, qt);  // q_F rows, q_T columns
  const Sparse mass_f = apply_essential_bc(mass_full, qf);

  BlockAssembler c({nt, nf}, {nt, nf});
  c.add(0, 0, mass_t, inv_l);
  c.add(1, 0, mass_ft, -a * inv_l);
  c.add(0, 1, Sparse(mass_ft.transpose()), -a * inv_l);
  c.add(1, 1, mass_f, a * a * inv_l + params.c0);
  c.add(1, 1, reduced(FormKind::GradGradScalar, qf), params.kappa);
  BlockAssembler b({nt, nf}, {v.num_free()});
  b.add(0, 0, reduced(FormKind::DivCoupling, v, qt, -1.0));
  BlockAssembler s_q({nt, nf}, {nt, nf});
  s_q.add(0, 0, zero_mean_mass(qt));
  BlockAssembler mq({nt, nf}, {nt, nf});
  mq.add(0, 0, mass_t);
  mq.add(1, 1, mass_f);

  dp.system.A = reduced(FormKind::EpsEps, v);
  dp.system.B = b.sparse();
  dp.system.C = c.sparse();
  dp.system.v_layout = layout_of({"u"}, dp.v_spaces);
  dp.system.q_layout = layout_of({"p_T", "p_F"}, dp.q_spaces);
  dp.mean_mode = Matrix::Zero(nt + nf, nt + nf);
  dp.q_mass = mq.dense();
  finish(dp, s_q.dense(), to_dense(dp.system.A));
  return dp;
}

DiscreteProblem build_example6(int n, const ExampleParams& params) {
  validate_params(6, params);
  DiscreteProblem dp;
  dp.example_id = 6;
  dp.level = n;
  dp.params = params;
  dp.mesh = make_mesh(n);
  dp.v_spaces = {build_space(dp.mesh, Family::P2Vector, true), build_space(dp.mesh, Family::RT0, true)};
  dp.q_spaces = {build_space(dp.mesh, Family::P0, false, true), build_space(dp.mesh, Family::P0, false, true)};
  const FESpace& u = dp.v_spaces[0];
  const FESpace& w = dp.v_spaces[1];
  const FESpace& qt = dp.q_spaces[0];
  const FESpace& q = dp.q_spaces[1];
  const int nu = u.num_free(), nw = w.num_free(), nq = q.num_free();
  const double two_mu = 2.0 * params.mu, tk = params.tau * params.kappa;
  const double inv_l = 1.0 / params.lambda, a = params.alpha_bw;

  const Sparse mass = reduced(FormKind::Mass, q);
  const Matrix s0 = zero_mean_mass(q);
  const Matrix mean = mean_metric(q);

  BlockAssembler av({nu, nw}, {nu, nw});
  av.add(0, 0, reduced(FormKind::EpsEps, u), two_mu);
  av.add(1, 1, reduced(FormKind::VectorMass, w), 1.0 / tk);
  BlockAssembler b({nq, nq}, {nu, nw});
  b.add(0, 0, reduced(FormKind::DivCoupling, u, qt));
  b.add(1, 1, reduced(FormKind::DivCoupling, w, q, -1.0));
  BlockAssembler mm({nq, nq}, {nq, nq});
  mm.add(0, 0, mean, 1.0 / two_mu);
  mm.add(1, 1, mean, tk);
  BlockAssembler c({nq, nq}, {nq, nq});
  c.add(0, 0, mass, inv_l);
  c.add(0, 1, mass, a * inv_l);
  c.add(1, 0, mass, a * inv_l);
  c.add(1, 1, mass, params.c0 + a * a * inv_l);
  BlockAssembler s_q({nq, nq}, {nq, nq});
  s_q.add(0, 0, s0, 1.0 / two_mu);
  s_q.add(1, 1, s0, tk);
  BlockAssembler mq({nq, nq}, {nq, nq});
  mq.add(0, 0, mass);
  mq.add(1, 1, mass);

  dp.mean_mode = mm.dense();
  dp.system.A = av.sparse();
  dp.system.B = b.sparse();
  dp.system.C = to_sparse(Matrix(c.dense() + dp.mean_mode));
  dp.system.v_layout = layout_of({"u", "w"}, dp.v_spaces);
  dp.system.q_layout = layout_of({"p_T", "p"}, dp.q_spaces);
  dp.q_mass = mq.dense();
  finish(dp, s_q.dense(), to_dense(dp.system.A));
  return dp;
}

DiscreteProblem build_example7(int n, const ExampleParams& params) {
  validate_params(7, params);
  DiscreteProblem dp;
  dp.example_id = 7;
  dp.level = n;
  dp.params = params;
  dp.mesh = make_mesh(n);
  dp.v_spaces = {build_space(dp.mesh, Family::P2Vector, true), build_space(dp.mesh, Family::RT0, true)};
  dp.q_spaces = {build_space(dp.mesh, Family::P0, false, true)};
  const FESpace& u = dp.v_spaces[0];
  const FESpace& w = dp.v_spaces[1];
  const FESpace& q = dp.q_spaces[0];
  const int nu = u.num_free(), nw = w.num_free();
  const double weight = params.R_p + 1.0 / (1.0 + params.lambda_mu);

  BlockAssembler av({nu, nw}, {nu, nw});
  av.add(0, 0, reduced(FormKind::EpsEps, u));
  av.add(0, 0, reduced(FormKind::DivDiv, u), params.lambda_mu);
  av.add(1, 1, reduced(FormKind::VectorMass, w), 1.0 / params.R_p);
  BlockAssembler b({q.num_free()}, {nu, nw});
  b.add(0, 0, reduced(FormKind::DivCoupling, u, q, -1.0));
  b.add(0, 1, reduced(FormKind::DivCoupling, w, q, -1.0));

  const Sparse mass = reduced(FormKind::Mass, q);
  dp.mean_mode = weight * mean_metric(q);
  dp.system.A = av.sparse();
  dp.system.B = b.sparse();
  dp.system.C = to_sparse(Matrix(params.alpha_p * to_dense(mass) + dp.mean_mode));
  dp.system.v_layout = layout_of({"u", "w"}, dp.v_spaces);
  dp.system.q_layout = layout_of({"p"}, dp.q_spaces);
  dp.q_mass = to_dense(mass);
  finish(dp, weight * zero_mean_mass(q), to_dense(dp.system.A));
  return dp;
}

DiscreteProblem build_example(int example_id, int n, const ExampleParams& params) {
  switch (example_id) {
    case 1: return build_example1(n, params.t);
    case 2: return build_example2(n, params.kappa);
    case 3: return build_example3(n, params);
    case 4: return build_example4(n, params);
    case 5: return build_example5(n, params);
    case 6: return build_example6(n, params);
    case 7: return build_example7(n, params);
  }
  throw Error(ErrorCode::ValidationError, "example id must be 1..7, got " + std::to_string(example_id));
}

std::size_t ParameterGrid::size() const {
  std::size_t n = 1;
  for (const auto& axis : axes) n *= axis.second.size();
  return n;
}

std::vector<ExampleParams> ParameterGrid::points(const ExampleParams& base) const {
  std::vector<ExampleParams> out;
  const std::size_t total = size();
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    ExampleParams p = base;
    std::size_t rem = idx;
    for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
      p.set(it->first, it->second[rem % it->second.size()]);
      rem /= it->second.size();
    }
    out.push_back(p);
  }
  return out;
}

std::string ParameterGrid::label(std::size_t index) const {
  std::vector<std::string> parts(axes.size());
  std::size_t rem = index;
  for (std::size_t k = axes.size(); k-- > 0;) {
    const auto& axis = axes[k];
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", axis.second[rem % axis.second.size()]);
    parts[k] = axis.first + "=" + buf;
    rem /= axis.second.size();
  }
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? ";" : "") + parts[k];
  return out;
}

const std::vector<double>& default_sweep_values() {
  static const std::vector<double> values = {1e-8, 1e-4, 1.0, 1e4, 1e8};
  return values;
}

ParameterGrid default_grid(int example_id) {
  static const std::map<int, std::vector<std::string>> axes = {
      {1, {"t"}},
      {2, {"kappa"}},
      {3, {"lambda", "c0", "kappa", "alpha_bw"}},
      {4, {"lambda", "c0", "kappa"}},
      {5, {"lambda", "c0", "kappa", "alpha_bw"}},
      {6, {"mu", "lambda", "kappa", "c0"}},
      {7, {"lambda_mu", "R_p", "alpha_p"}},
  };
  example_parameters(example_id);
  ParameterGrid grid;
  for (const auto& name : axes.at(example_id)) grid.axes.emplace_back(name, default_sweep_values());
  return grid;
}

namespace {

FESpace pressure_space(std::shared_ptr<const Mesh> mesh, PressureSpace kind) {
  switch (kind) {
    case PressureSpace::P0: return build_space(mesh, Family::P0);
    case PressureSpace::P0ZeroMean: return build_space(mesh, Family::P0, false, true);
    case PressureSpace::P1: return build_space(mesh, Family::P1);
    case PressureSpace::P1ZeroMean: return build_space(mesh, Family::P1, false, true);
    case PressureSpace::P1Dirichlet: return build_space(mesh, Family::P1, true);
  }
  throw Error(ErrorCode::ValidationError, "unknown pressure space");
}

InfSup reference_pencil(const FESpace& v, const Sparse& metric_v, const FESpace& q) {
  InfSup out;
  if (v.num_free() == 0 || q.num_free() == 0) {
    out.degenerate = true;
    return out;
  }
  const Matrix m_q = q.zero_mean ? zero_mean_mass(q) : to_dense(reduced(FormKind::Mass, q));
  const Matrix b = to_dense(reduced(FormKind::DivCoupling, v, q));
  const CholeskyFactor<double> fv(to_dense(metric_v));
  const Matrix w = fv.half_solve(b.transpose());
  const Matrix g = symmetrized(w.transpose() * w);
  const double lo = gen_sym_eig<double>(g, m_q, EigMode::Extremal).min();
  out.beta = std::sqrt(std::max(lo, 0.0));
  out.degenerate = out.beta < kHypothesisFloor;
  return out;
}

}  // namespace

InfSup stokes_infsup(int n, PressureSpace pressure) {
  const auto mesh = make_mesh(n);
  const FESpace v = build_space(mesh, Family::P2Vector, true);
  const FESpace q = pressure_space(mesh, pressure);
  if (v.num_free() == 0) return {0.0, true};
  const Sparse h1 = reduced(FormKind::Stiffness, v) + reduced(FormKind::VectorMass, v);
  return reference_pencil(v, h1, q);
}

InfSup darcy_infsup(int n, bool rt_dirichlet, PressureSpace pressure) {
  const auto mesh = make_mesh(n);
  const FESpace v = build_space(mesh, Family::RT0, rt_dirichlet);
  const FESpace q = pressure_space(mesh, pressure);
  if (v.num_free() == 0) return {0.0, true};
  const Sparse hdiv = reduced(FormKind::DivDiv, v) + reduced(FormKind::VectorMass, v);
  return reference_pencil(v, hdiv, q);
}

ReferenceInfSup discrete_reference_infsup(int n, int example_id) {
  if (n < 1) throw Error(ErrorCode::ValidationError, "mesh level must be >= 1");
  ReferenceInfSup out;
  switch (example_id) {
    case 1:
      out.beta_d = darcy_infsup(n, false, PressureSpace::P0);
      out.beta_s = stokes_infsup(n, PressureSpace::P0ZeroMean);
      break;
    case 2:
    case 4:
    case 5:
      out.beta_d = darcy_infsup(n, true, PressureSpace::P0ZeroMean);
      out.beta_s = stokes_infsup(n, PressureSpace::P1ZeroMean);
      break;
    case 3:
      out.beta_d = darcy_infsup(n, true, PressureSpace::P0ZeroMean);
      out.beta_s = stokes_infsup(n, PressureSpace::P1Dirichlet);
      break;
    case 6:
    case 7:
      out.beta_d = darcy_infsup(n, true, PressureSpace::P0ZeroMean);
      out.beta_s = stokes_infsup(n, PressureSpace::P0ZeroMean);
      break;
    default:
      throw Error(ErrorCode::ValidationError, "example id must be 1..7, got " + std::to_string(example_id));
  }
  return out;
}

double example_beta_floor(int example_id, const ReferenceInfSup& ref) {
  const double bd = ref.beta_d.beta, bs = ref.beta_s.beta;
  switch (example_id) {
    case 1: return bd;
    case 2:
    case 3:
    case 5: return bs / std::sqrt(2.0);
    case 4: return 1.0 / std::sqrt(1.0 / (bs * bs) + 1.0);
    case 6: return 1.0 / std::sqrt(2.0 * std::max(1.0 / (bs * bs), 1.0 / (bd * bd)));
    case 7: return std::min(bd, bs / std::sqrt(2.0));
  }
  throw Error(ErrorCode::ValidationError, "example id must be 1..7, got " + std::to_string(example_id));
}

}  // namespace saddlecheck
