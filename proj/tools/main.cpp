#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cachecraft_cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Exact coded-caching loads, bounds, allocations and scheme verification"};
  app.require_subcommand(1);
  cachecraft::cli::Options options;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", options.out, "Write the result here instead of stdout");
    cmd->add_option("--decimals", options.decimals, "Digits in decimal renderings (0: exact fractions only)")
        ->capture_default_str();
  };

  CLI::App* load = app.add_subcommand("load", "Minimum load, lower bounds and closed forms for a memory vector");
  load->add_option("--instance", options.instance, "Instance JSON")->required();
  load->add_flag("--dump-lp", options.dump_lp, "Print the LP to stderr before solving");
  add_common(load);

  CLI::App* allocate = app.add_subcommand("allocate", "Optimal memory allocation for link capacities C and budget m_tot");
  allocate->add_option("--instance", options.instance, "Instance JSON with C and m_tot")->required();
  add_common(allocate);

  CLI::App* verify = app.add_subcommand("verify", "Check a scheme for feasibility and decode it at packet level");
  verify->add_option("--instance", options.instance, "Instance JSON")->required();
  verify->add_option("--scheme", options.scheme, "Scheme JSON, e.g. the output of load or allocate")->required();
  add_common(verify);

  CLI::App* sweep = app.add_subcommand("sweep", "Evaluate a parameter grid and write CSV");
  sweep->add_option("--spec", options.spec, "Sweep definition JSON")->required();
  sweep->add_option("--jobs", options.jobs, "Worker threads (0: one per core)")->capture_default_str();
  add_common(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return cachecraft::cli::run(app.get_subcommands().front()->get_name(), options, std::cout, std::cerr);
}
