#include "saddlecheck/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "saddlecheck/precond.hpp"

namespace saddlecheck {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw Error(ErrorCode::ValidationError, "key '" + key + "': '" + s + "' is not a finite number");
  return v;
}

long long parse_integer(const std::string& s, const std::string& key) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::ValidationError, "key '" + key + "': '" + s + "' is not an integer");
  return v;
}

Analysis parse_analysis(const std::string& s) {
  if (s == "constants") return Analysis::Constants;
  if (s == "witness") return Analysis::Witness;
  if (s == "precond") return Analysis::Precond;
  if (s == "reference_infsup") return Analysis::ReferenceInfSup;
  throw Error(ErrorCode::ValidationError, "key 'analyses': unknown analysis '" + s + "'");
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& header) : path_(path), out_(path) {
    if (!out_) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out_ << header << '\n';
  }

  std::ofstream& stream() { return out_; }

  void close() {
    out_.close();
    if (!out_) throw Error(ErrorCode::IoError, "failed writing " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::mt19937_64 point_rng(std::uint64_t seed, int level, std::size_t point) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(level), static_cast<std::uint32_t>(point)};
  return std::mt19937_64(seq);
}

Combined random_combined(std::mt19937_64& rng, int n_v, int n_q) {
  std::normal_distribution<double> normal;
  Combined x{Vector(n_v), Vector(n_q)};
  for (int i = 0; i < n_v; ++i) x.u(i) = normal(rng);
  for (int i = 0; i < n_q; ++i) x.p(i) = normal(rng);
  return x;
}

}  // namespace

const char* to_string(Analysis analysis) {
  switch (analysis) {
    case Analysis::Constants: return "constants";
    case Analysis::Witness: return "witness";
    case Analysis::Precond: return "precond";
    case Analysis::ReferenceInfSup: return "reference_infsup";
  }
  return "?";
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

ParameterGrid RunConfig::effective_grid() const {
  return grid.axes.empty() ? default_grid(example_id) : grid;
}

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) {
    const long long n = parse_integer(item, "levels");
    if (n < 1 || n > kMaxLevel)
      throw Error(ErrorCode::ValidationError,
                  "key 'levels': " + item + " outside [1, " + std::to_string(kMaxLevel) + "]");
    out.push_back(static_cast<int>(n));
  }
  if (out.empty()) throw Error(ErrorCode::ValidationError, "key 'levels': empty list");
  return out;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, std::pair<std::string, int>> entries;  // key -> (value, line)
  std::vector<std::string> order;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": empty key or value");
    if (entries.count(key))
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    entries[key] = {value, lineno};
    order.push_back(key);
  }

  if (!entries.count("example")) throw Error(ErrorCode::ValidationError, "key 'example' is required");
  const long long id = parse_integer(entries["example"].first, "example");
  if (id < 1 || id > 7) throw Error(ErrorCode::ValidationError, "key 'example': must be 1..7");
  cfg.example_id = static_cast<int>(id);
  const auto& allowed = example_parameters(cfg.example_id);

  if (!entries.count("levels"))
    cfg.warnings.push_back("levels not given; defaulting to 2,4");

  for (const auto& key : order) {
    const std::string& value = entries[key].first;
    if (key == "example") continue;
    if (key == "levels") {
      cfg.levels = parse_levels(value);
    } else if (key == "analyses") {
      cfg.analyses.clear();
      for (const auto& a : split_list(value)) cfg.analyses.insert(parse_analysis(a));
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "seed") {
      const long long s = parse_integer(value, key);
      if (s < 0) throw Error(ErrorCode::ValidationError, "key 'seed': must be nonnegative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "witness_samples") {
      const long long s = parse_integer(value, key);
      if (s < 1) throw Error(ErrorCode::ValidationError, "key 'witness_samples': must be positive");
      cfg.witness_samples = static_cast<int>(s);
    } else if (key == "tol") {
      cfg.tol = parse_double(value, key);
      if (!(cfg.tol > 0 && cfg.tol < 1)) throw Error(ErrorCode::ValidationError, "key 'tol': must lie in (0,1)");
    } else if (key == "max_iter") {
      const long long m = parse_integer(value, key);
      if (m < 1) throw Error(ErrorCode::ValidationError, "key 'max_iter': must be positive");
      cfg.max_iter = static_cast<int>(m);
    } else if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) {
      std::vector<double> values;
      for (const auto& item : split_list(value)) values.push_back(parse_double(item, key));
      cfg.grid.axes.emplace_back(key, values);
    } else {
      throw Error(ErrorCode::ValidationError, "unknown key '" + key + "' for example " + std::to_string(id));
    }
  }
  for (const auto& p : cfg.effective_grid().points()) validate_params(cfg.example_id, p);
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

RunOutcome run(const RunConfig& config, std::ostream& err) {
  namespace fs = std::filesystem;
  RunOutcome outcome;
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + config.out_dir + ": " + ec.message());
  const fs::path dir(config.out_dir);

  const ParameterGrid grid = config.effective_grid();
  const auto points = grid.points();
  const bool want_constants = config.analyses.count(Analysis::Constants) > 0;
  const bool want_witness = config.analyses.count(Analysis::Witness) > 0;
  const bool want_precond = config.analyses.count(Analysis::Precond) > 0;
  const bool want_reference = config.analyses.count(Analysis::ReferenceInfSup) > 0;
  const int ex = config.example_id;
  auto fail = [&](const std::string& msg) { outcome.failures.push_back(msg); };

  std::optional<CsvFile> constants, witness, reference;
  if (want_constants) {
    constants.emplace(dir / "constants.csv", kConstantsHeader);
    outcome.files.push_back((dir / "constants.csv").string());
  }
  if (want_witness) {
    witness.emplace(dir / "witness.csv",
                    "example,level,param_point,sample,coercivity_ratio,boundedness_ratio,growth_bound,"
                    "u0_ratio,coercivity_ok,boundedness_ok");
    outcome.files.push_back((dir / "witness.csv").string());
  }
  if (want_reference) {
    reference.emplace(dir / "reference_infsup.csv",
                      "example,level,beta_d,beta_d_degenerate,beta_s,beta_s_degenerate,beta_floor");
    outcome.files.push_back((dir / "reference_infsup.csv").string());
  }

  for (int level : config.levels) {
    std::optional<double> floor;
    if (want_reference) {
      const auto ref = discrete_reference_infsup(level, ex);
      floor = example_beta_floor(ex, ref);
      reference->stream() << ex << ',' << level << ',' << format_number(ref.beta_d.beta) << ','
                          << ref.beta_d.degenerate << ',' << format_number(ref.beta_s.beta) << ','
                          << ref.beta_s.degenerate << ',' << format_number(*floor) << '\n';
    }
    if (!want_constants && !want_witness) continue;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::string label = grid.label(i);
      const std::string where = "example " + std::to_string(ex) + " level " + std::to_string(level) + " [" + label + "]";
      try {
        const auto dp = build_example(ex, level, points[i]);
        const auto r = verify_stability(dp.system, dp.norms);
        if (want_constants) {
          constants->stream() << ex << ',' << level << ',' << label << ',' << format_number(r.C_a_bar) << ','
                              << format_number(r.C_a_under) << ',' << format_number(r.beta_under) << ','
                              << format_number(r.alpha_under) << ',' << format_number(r.C_bar) << ','
                              << format_number(r.epsilon) << ',' << format_number(r.delta) << ','
                              << format_number(r.theoretical_alpha_bound) << ',' << r.hypotheses_ok << '\n';
          if (!r.chain_ok)
            fail(where + ": alpha_under " + format_number(r.alpha_under) + " below bound " +
                 format_number(r.theoretical_alpha_bound));
          if (r.alpha_under > r.C_bar * (1 + 1e-12)) fail(where + ": alpha_under exceeds C_bar");
          if (floor && r.beta_applicable && r.beta_under < *floor - 1e-8)
            fail(where + ": beta_under " + format_number(r.beta_under) + " below floor " + format_number(*floor));
        }
        if (want_witness && r.hypotheses_ok) {
          auto rng = point_rng(config.seed, level, i);
          const double growth = theoretical_bound(r).test_pair_growth;
          int bad = 0;
          for (int s = 0; s < config.witness_samples; ++s) {
            const auto x = random_combined(rng, dp.system.n_v(), dp.system.n_q());
            const auto w = witness_check(dp.system, dp.norms, r, x);
            witness->stream() << ex << ',' << level << ',' << label << ',' << s << ','
                              << format_number(w.coercivity_ratio) << ',' << format_number(w.boundedness_ratio)
                              << ',' << format_number(growth) << ',' << format_number(w.u0_ratio) << ','
                              << w.coercivity_ok << ',' << w.boundedness_ok << '\n';
            if (!w.coercivity_ok || !w.boundedness_ok) ++bad;
          }
          if (bad) fail(where + ": " + std::to_string(bad) + " witness samples violate the estimates");
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::IoError) throw;
        if (e.code() != ErrorCode::QbarSingular) {
          fail(where + ": " + e.what());
          continue;
        }
        // Qbar fails the SPD tolerance: no fitted norms, so nothing to assert.
        ++outcome.unbuildable;
        err << "note: " << where << ": " << e.what() << '\n';
        if (want_constants) {
          constants->stream() << ex << ',' << level << ',' << label;
          for (int k = 0; k < 8; ++k) constants->stream() << ",nan";
          constants->stream() << ",0\n";
        }
      }
    }
  }

  if (want_precond) {
    CsvFile precond(dir / "precond.csv",
                    "example,level,param_point,iterations,converged,final_residual,hypotheses_ok,C_bar,alpha_under");
    outcome.files.push_back((dir / "precond.csv").string());
    PrecondOptions opts;
    opts.tol = config.tol;
    opts.max_iter = config.max_iter;
    opts.seed = config.seed;
    try {
      const auto sweep = robustness_sweep(ex, grid, config.levels, opts);
      for (const auto& r : sweep.runs)
        precond.stream() << r.example_id << ',' << r.level << ',' << r.param_point << ',' << r.iterations << ','
                         << r.converged << ',' << format_number(r.final_residual) << ',' << r.hypotheses_ok << ','
                         << format_number(r.C_bar) << ',' << format_number(r.alpha_under) << '\n';
      if (!want_constants && !want_witness)
        for (const auto& r : sweep.runs)
          if (!r.built) ++outcome.unbuildable;
      for (const auto& s : sweep.spreads)
        if (!s.ok)
          fail("example " + std::to_string(ex) + " level " + std::to_string(s.level) + " axis " + s.axis + " [" +
               s.fixed + "]: iteration spread " + std::to_string(s.max_iterations) + "/" +
               std::to_string(s.min_iterations) + " exceeds 4");
    } catch (const Error& e) {
      if (e.code() == ErrorCode::IoError) throw;
      fail(std::string("precond sweep: ") + e.what());
    }
    precond.close();
  }
  if (constants) constants->close();
  if (witness) witness->close();
  if (reference) reference->close();

  {
    std::ofstream meta(dir / "meta.txt");
    if (!meta) throw Error(ErrorCode::IoError, "cannot open " + (dir / "meta.txt").string());
    meta << "example = " << ex << '\n';
    meta << "levels =";
    for (std::size_t k = 0; k < config.levels.size(); ++k) meta << (k ? "," : " ") << config.levels[k];
    meta << "\nseed = " << config.seed << '\n';
    meta << "analyses =";
    bool first = true;
    for (Analysis a : config.analyses) {
      meta << (first ? " " : ",") << to_string(a);
      first = false;
    }
    meta << '\n';
    for (const auto& [name, values] : grid.axes) {
      meta << name << " =";
      for (std::size_t k = 0; k < values.size(); ++k) meta << (k ? "," : " ") << format_number(values[k]);
      meta << '\n';
    }
    meta << "grid_points = " << points.size() << '\n';
    meta << "witness_samples = " << config.witness_samples << '\n';
    meta << "tol = " << format_number(config.tol) << '\n';
    for (const auto& w : config.warnings) meta << "warning: " << w << '\n';
    meta << "unbuildable_points = " << outcome.unbuildable << '\n';
    meta << "failures = " << outcome.failures.size() << '\n';
    if (!meta) throw Error(ErrorCode::IoError, "failed writing " + (dir / "meta.txt").string());
    outcome.files.push_back((dir / "meta.txt").string());
  }

  for (const auto& f : outcome.failures) err << "FAIL " << f << '\n';
  outcome.exit_code = outcome.failures.empty() ? kExitOk : kExitInvariantFailure;
  return outcome;
}

}  // namespace saddlecheck
