// Command line entry point.  Subcommand implementations live in
// tns/runner.hpp; this file only parses flags and maps outcomes to exit
// codes.  Scientific terminations (blow-up flags) exit 0; configuration,
// I/O, and usage errors exit nonzero.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tns/config.hpp"
#include "tns/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int threads = 1;
  std::vector<std::string> overrides;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* c = cmd->add_option("--config", args.config_path, "configuration file (JSON or key = value text)");
  if (config_required) c->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides the config's output entry)");
  cmd->add_option("--threads", args.threads, "worker threads for sweep cells")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--override", args.overrides,
                  "dotted config override, e.g. stepper.dt=1e-4 (repeatable)");
}

tns::json resolved_tree(const CommonArgs& args) {
  tns::json tree =
      args.config_path.empty() ? tns::json::object() : tns::load_config_tree(args.config_path);
  for (const auto& o : args.overrides) tns::apply_override(tree, o);
  if (!args.out_dir.empty()) tree["output"] = args.out_dir;
  return tree;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral simulation and blow-up verification for toy fluid models"};
  app.require_subcommand(1);

  CommonArgs simulate_args, certify_args, compare_args, sweep_args, verify_args;
  auto* simulate = app.add_subcommand("simulate", "advance a model and record diagnostics");
  add_common_flags(simulate, simulate_args, true);
  auto* certify = app.add_subcommand(
      "certify", "build a blow-up certificate and check trajectory domination");
  add_common_flags(certify, certify_args, true);
  auto* compare = app.add_subcommand(
      "compare", "run the reference and toy models side by side from identical data");
  add_common_flags(compare, compare_args, true);
  auto* sweep = app.add_subcommand("sweep", "map a command over a parameter grid");
  add_common_flags(sweep, sweep_args, true);
  auto* verify = app.add_subcommand("verify-multipliers",
                                    "scan the coupling matrix for sign violations");
  add_common_flags(verify, verify_args, false);

  CLI11_PARSE(app, argc, argv);

  try {
    tns::CommandResult result;
    if (simulate->parsed()) {
      result = tns::cmd_simulate(tns::parse_run_config(resolved_tree(simulate_args)));
    } else if (certify->parsed()) {
      result = tns::cmd_certify(tns::parse_run_config(resolved_tree(certify_args)));
    } else if (compare->parsed()) {
      result = tns::cmd_compare(tns::parse_run_config(resolved_tree(compare_args)));
    } else if (sweep->parsed()) {
      result = tns::cmd_sweep(resolved_tree(sweep_args), sweep_args.threads);
    } else if (verify->parsed()) {
      result = tns::cmd_verify_multipliers(tns::parse_run_config(resolved_tree(verify_args)));
    }
    std::puts(result.message.c_str());
    return result.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
