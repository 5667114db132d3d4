// precarity: run household precarity scenarios and compare their reports.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "precarity/app.hpp"

int main(int argc, char** argv) {
  precarity::app::configure_logging();

  CLI::App cli{"Simulate household precarity under repeated algorithmic decisions"};
  cli.require_subcommand(0, 1);

  std::vector<std::string> top_compare;
  cli.add_option("--compare", top_compare, "Compare two report files (same as `compare A B`)")
      ->expected(2);

  precarity::app::RunOptions run;
  std::uint64_t seed = 0;
  auto* run_cmd = cli.add_subcommand("run", "Run every scenario of a config file");
  run_cmd->add_option("--config", run.config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the seed of every scenario");
  run_cmd->add_flag("--dry-run", run.dry_run, "Validate config and data, run nothing");
  run_cmd->add_flag("--parallel-scenarios", run.parallel_scenarios, "Run scenarios concurrently");

  std::string report_a, report_b;
  auto* cmp_cmd = cli.add_subcommand("compare", "Per-stratum deltas of report B against report A");
  cmp_cmd->add_option("A", report_a, "Baseline report")->required()->check(CLI::ExistingFile);
  cmp_cmd->add_option("B", report_b, "Compared report")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(cli, argc, argv);

  if (*run_cmd) {
    if (*seed_opt) run.seed = seed;
    if (run.dry_run && run.out.empty()) run.out = ".";
    return precarity::app::run(run, std::cerr);
  }
  if (*cmp_cmd) return precarity::app::compare(report_a, report_b, std::cout, std::cerr);
  if (top_compare.size() == 2) {
    return precarity::app::compare(top_compare[0], top_compare[1], std::cout, std::cerr);
  }
  std::cerr << cli.help();
  return 1;
}
