#include "saddlecheck/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace saddlecheck {

double coercivity_constant(const System& sys, const Norms& norms) {
  return gen_sym_eig<double>(to_dense(sys.A), norms.S_V, EigMode::Extremal).min();
}

double continuity_constant_a(const System& sys, const Norms& norms) {
  return gen_sym_eig<double>(to_dense(sys.A), norms.Vbar, EigMode::Extremal).max();
}

Matrix coupling_schur(const System& sys, const Norms& norms) {
  const Matrix bt = to_dense(sys.B).transpose();
  const Matrix w = norms.Vbar_factor.half_solve(bt);
  Matrix g = w.transpose() * w;
  return 0.5 * (g + g.transpose());
}

double small_inf_sup(const System& sys, const Norms& norms) {
  const double lo = gen_sym_eig<double>(coupling_schur(sys, norms), norms.S_Q, EigMode::Extremal).min();
  return std::sqrt(std::max(lo, 0.0));
}

namespace {

// |xᵀMx / xᵀNx| accumulated in long double.
double rayleigh_extended(const Matrix& m, const Matrix& n, const Vector& x) {
  long double num = 0, den = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    long double mj = 0, nj = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      mj += static_cast<long double>(m(i, j)) * x(i);
      nj += static_cast<long double>(n(i, j)) * x(i);
    }
    num += mj * x(j);
    den += nj * x(j);
  }
  return static_cast<double>(std::abs(num / den));
}

}  // namespace

BabuskaConstants babuska_constants(const System& sys, const Norms& norms) {
  if (sys.size() > kDeskScaleLimit)
    throw Error(ErrorCode::DeskScaleExceeded, "Babuska pencil exceeds desk scale");
  const Matrix op = block_operator_dense(sys), metric = norms.combined_metric();
  const auto res = gen_sym_eig<double>(op, metric);
  // With a badly conditioned metric the eigenvectors stay accurate but the
  // reduced eigenvalues lose digits; their Rayleigh quotients recover them.
  Eigen::Index lo = 0, hi = 0;
  res.eigenvalues.cwiseAbs().minCoeff(&lo);
  res.eigenvalues.cwiseAbs().maxCoeff(&hi);
  return {rayleigh_extended(op, metric, res.eigenvectors.col(lo)),
          rayleigh_extended(op, metric, res.eigenvectors.col(hi))};
}

ProofConstants theoretical_bound(double C_a_bar, double C_a_under, double beta_under) {
  if (!(C_a_under > 0) || !(beta_under > 0))
    throw Error(ErrorCode::HypothesisFailed, "coercivity and small inf-sup constants must be positive");
  ProofConstants pc;
  const double inv_beta2 = 1.0 / (beta_under * beta_under);
  pc.epsilon = 0.5 * beta_under * beta_under / C_a_bar;
  pc.delta = std::max(0.25 / C_a_under + C_a_bar * inv_beta2, 0.75);
  const double d2 = pc.delta * pc.delta;
  pc.test_pair_growth = std::sqrt(2.0 * std::max(d2 + 1.0, inv_beta2 + d2));
  pc.bound = 0.25 / pc.test_pair_growth;
  return pc;
}

ProofConstants theoretical_bound(const StabilityReport& report) {
  return theoretical_bound(report.C_a_bar, report.C_a_under, report.beta_under);
}

StabilityReport verify_stability(const System& sys, const Norms& norms) {
  if (sys.size() > kDeskScaleLimit)
    throw Error(ErrorCode::DeskScaleExceeded, "system exceeds desk scale");
  StabilityReport r;
  try {
    r.C_a_under = coercivity_constant(sys, norms);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyRange) throw;
    r.coercivity_applicable = false;
    r.note += "S_V vanishes; ";
  }
  r.C_a_bar = continuity_constant_a(sys, norms);
  try {
    r.beta_under = small_inf_sup(sys, norms);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyRange) throw;
    r.beta_applicable = false;
    r.note += "S_Q vanishes, small inf-sup not applicable; ";
  }
  const auto bc = babuska_constants(sys, norms);
  r.alpha_under = bc.alpha_under;
  r.C_bar = bc.C_bar;

  r.hypotheses_ok = r.coercivity_applicable && r.beta_applicable &&
                    r.C_a_under > kHypothesisFloor && r.beta_under > kHypothesisFloor;
  if (r.hypotheses_ok) {
    const auto pc = theoretical_bound(r);
    r.epsilon = pc.epsilon;
    r.delta = pc.delta;
    r.theoretical_alpha_bound = pc.bound;
    r.chain_ok = r.alpha_under >= pc.bound - kChainTol;
    if (!r.chain_ok) r.note += "alpha below theoretical bound; ";
  } else {
    r.note += "hypotheses fail; ";
  }
  return r;
}

WitnessResult witness_check(const System& sys, const Norms& norms, const StabilityReport& report,
                            const Combined& x) {
  if (!report.hypotheses_ok)
    throw Error(ErrorCode::HypothesisFailed, "witness needs C_a_under > 0 and beta_under > 0");
  if (x.u.size() != sys.n_v() || x.p.size() != sys.n_q())
    throw Error(ErrorCode::DimensionMismatch, "witness input does not match the system");
  const double x_norm = combined_norm(norms, x);
  if (!(x_norm > 0)) throw Error(ErrorCode::HypothesisFailed, "witness input must be nonzero");

  const ProofConstants pc = theoretical_bound(report);
  const double p_semi2 = x.p.dot(norms.S_Q * x.p);

  Vector u0 = Vector::Zero(sys.n_v());
  WitnessResult out;
  if (p_semi2 > 0) {
    const Vector btp = sys.B.transpose() * x.p;
    const Vector riesz = norms.Vbar_factor.solve_vector(btp);
    const double gpp = btp.dot(riesz);
    if (!(gpp > 0))
      throw Error(ErrorCode::HypothesisFailed, "b(., p) vanishes although |p|_Q > 0");
    u0 = (p_semi2 / gpp) * riesz;
    out.u0_ratio = v_norm(norms, u0) * report.beta_under / std::sqrt(p_semi2);
  }
  const Vector p0 = norms.Qbar_factor.solve_vector(sys.B * x.u);

  out.input = x;
  out.constructed = {pc.delta * x.u + u0, -pc.delta * x.p + p0};
  out.coercivity_ratio = bilinear_form(sys, x, out.constructed) / (x_norm * x_norm);
  out.boundedness_ratio = combined_norm(norms, out.constructed) / x_norm;
  out.coercivity_ok = out.coercivity_ratio >= 0.25 - 1e-10;
  out.boundedness_ok = out.boundedness_ratio <= pc.test_pair_growth + 1e-10;
  return out;
}

}  // namespace saddlecheck
