#include <iostream>

#include "CLI11.hpp"

#include "poisson_currents/cli.hpp"

namespace cli = poisson_currents::cli;

int main(int argc, char** argv) {
  CLI::App app{"Poisson transforms, Schottky groups and boundary currents: batch verification"};
  app.require_subcommand(1);
  cli::RunConfig config;

  for (const auto& name : cli::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", config.out, "output file (output directory for orbit-series and schottky-current)");
    sub->add_option("--kmax", config.kmax, "truncation level, <= 64");
    sub->add_option("--rgrid", config.rgrid, "geometric:J or list:r1,r2,...");
    sub->add_option("--max-word-len", config.max_word_len, "longest reduced word, <= 20");
    sub->add_option("--tol", config.tol, "pass tolerance, > 0");
    sub->add_option("--seed", config.seed, "seed for randomized sweeps");
    sub->callback([&config, sub] { config.command = sub->get_name(); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kInputError;
  }
  return cli::run(config, std::cout, std::cerr);
}
