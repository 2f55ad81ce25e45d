#include "saddlecheck/precond.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <random>

namespace saddlecheck {

LinearOperator<double> block_diag_preconditioner(const Norms& norms) {
  const int nv = norms.n_v();
  return [&norms, nv](const Vector& x) {
    Vector y(x.size());
    y.head(nv) = norms.Vbar_factor.solve_vector(x.head(nv));
    y.tail(x.size() - nv) = norms.Qbar_factor.solve_vector(x.tail(x.size() - nv));
    return y;
  };
}

LinearOperator<double> mass_q_preconditioner(const Norms& norms, const Matrix& q_mass) {
  const int nv = norms.n_v();
  auto mass_factor = std::make_shared<CholeskyFactor<double>>(q_mass);
  return [&norms, nv, mass_factor](const Vector& x) {
    Vector y(x.size());
    y.head(nv) = norms.Vbar_factor.solve_vector(x.head(nv));
    y.tail(x.size() - nv) = mass_factor->solve_vector(x.tail(x.size() - nv));
    return y;
  };
}

PrecondRun run_preconditioned_minres(const DiscreteProblem& problem, const PrecondOptions& options,
                                     const std::string& param_point) {
  const System& sys = problem.system;
  PrecondRun run;
  run.example_id = problem.example_id;
  run.level = problem.level;
  run.param_point = param_point;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  Vector x_true(sys.size());
  for (Eigen::Index i = 0; i < x_true.size(); ++i) x_true(i) = normal(rng);

  const LinearOperator<double> apply_a = [&sys](const Vector& x) {
    return apply_block_operator(sys, Combined::split(x, sys.n_v())).stacked();
  };
  const Vector rhs = apply_a(x_true);
  const LinearOperator<double> pinv = options.kind == PreconditionerKind::Fitted
                                          ? block_diag_preconditioner(problem.norms)
                                          : mass_q_preconditioner(problem.norms, problem.q_mass);
  try {
    const auto res = minres<double>(apply_a, pinv, rhs, options.tol, options.max_iter);
    run.iterations = res.iterations;
    run.converged = res.converged;
    run.final_residual = res.relative_residual;
  } catch (const MinresBreakdown& e) {
    run.iterations = e.iterations();
    run.final_residual = e.relative_residual();
    run.converged = false;
    run.error = e.what();
  }
  if (options.with_constants) {
    const auto report = verify_stability(sys, problem.norms);
    run.hypotheses_ok = report.hypotheses_ok;
    run.C_bar = report.C_bar;
    run.alpha_under = report.alpha_under;
  }
  return run;
}

bool SweepResult::ok() const {
  return std::all_of(spreads.begin(), spreads.end(), [](const AxisSpread& s) { return s.ok; });
}

SweepResult robustness_sweep(int example_id, const ParameterGrid& grid, const std::vector<int>& levels,
                             const PrecondOptions& options, const ExampleParams& base) {
  SweepResult out;
  const auto points = grid.points(base);
  for (int level : levels) {
    const std::size_t first = out.runs.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
      try {
        const auto problem = build_example(example_id, level, points[i]);
        out.runs.push_back(run_preconditioned_minres(problem, options, grid.label(i)));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::QbarSingular) throw;
        PrecondRun failed;
        failed.example_id = example_id;
        failed.level = level;
        failed.param_point = grid.label(i);
        failed.built = false;
        failed.error = e.what();
        out.runs.push_back(failed);
      }
    }

    // Group the runs of this level into lines along each axis.
    for (std::size_t k = 0; k < grid.axes.size(); ++k) {
      std::size_t stride = 1;
      for (std::size_t j = k + 1; j < grid.axes.size(); ++j) stride *= grid.axes[j].second.size();
      const std::size_t len = grid.axes[k].second.size();
      std::map<std::size_t, std::vector<std::size_t>> lines;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const std::size_t key = (i / (stride * len)) * stride + i % stride;
        lines[key].push_back(i);
      }
      for (const auto& [key, members] : lines) {
        AxisSpread s;
        s.axis = grid.axes[k].first;
        s.level = level;
        s.applicable = true;
        s.min_iterations = s.max_iterations = out.runs[first + members.front()].iterations;
        for (std::size_t i : members) {
          const PrecondRun& r = out.runs[first + i];
          s.applicable = s.applicable && r.built && r.converged && (r.hypotheses_ok || !options.with_constants);
          s.min_iterations = std::min(s.min_iterations, r.iterations);
          s.max_iterations = std::max(s.max_iterations, r.iterations);
        }
        // Label the line by the point where this axis takes its first value.
        std::string label = grid.label(members.front());
        const std::string prefix = s.axis + "=";
        std::string fixed;
        std::size_t pos = 0;
        while (pos <= label.size()) {
          const std::size_t end = std::min(label.find(';', pos), label.size());
          const std::string part = label.substr(pos, end - pos);
          if (part.rfind(prefix, 0) != 0) fixed += (fixed.empty() ? "" : ";") + part;
          pos = end + 1;
        }
        s.fixed = fixed;
        s.ok = !s.applicable || s.ratio() <= kMaxIterationSpread;
        out.spreads.push_back(s);
      }
    }
  }
  return out;
}

}  // namespace saddlecheck
