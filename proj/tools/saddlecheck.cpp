#include <CLI11.hpp>

#include <algorithm>
#include <iostream>

#include "saddlecheck/cli.hpp"

using namespace saddlecheck;

int main(int argc, char** argv) {
  CLI::App app{"Fitted-norm stability checks for perturbed saddle-point problems"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, levels;
  std::uint64_t seed = 0;
  auto* out_opt = app.add_option("--out-dir", out_dir, "output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides config)");
  auto* levels_opt = app.add_option("--levels", levels, "comma-separated mesh levels (overrides config)");

  struct Command {
    const char* name;
    const char* help;
    std::set<Analysis> analyses;  // empty: take from config
  };
  const std::vector<Command> commands = {
      {"analyze", "stability constants (analyses from config)", {}},
      {"sweep", "constants, witness, reference inf-sup and preconditioning",
       {Analysis::Constants, Analysis::Witness, Analysis::ReferenceInfSup, Analysis::Precond}},
      {"witness", "witness construction on random inputs", {Analysis::Witness}},
      {"precond", "MinRes robustness with the fitted block preconditioner", {Analysis::Precond}},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("config", config_path, "config file")->required();
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = parse_config(config_path);
    for (std::size_t k = 0; k < commands.size(); ++k)
      if (subs[k]->parsed() && !commands[k].analyses.empty()) cfg.analyses = commands[k].analyses;
    if (*out_opt) cfg.out_dir = out_dir;
    if (*seed_opt) cfg.seed = seed;
    if (*levels_opt) {
      cfg.levels = parse_levels(levels);
      cfg.warnings.erase(std::remove_if(cfg.warnings.begin(), cfg.warnings.end(),
                                        [](const std::string& w) { return w.rfind("levels", 0) == 0; }),
                         cfg.warnings.end());
    }
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
    const RunOutcome outcome = run(cfg, std::cerr);
    return outcome.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::IoError: return kExitIoError;
      case ErrorCode::ParseError:
      case ErrorCode::ValidationError: return kExitConfigError;
      default: return kExitInvariantFailure;
    }
  }
}
