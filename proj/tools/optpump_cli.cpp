#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "optpump/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace optpump;
  CLI::App app{"Optical-pumping ladder Liouvillian toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;

  const char* commands[][2] = {
      {"spectrum", "Liouvillian spectrum under the configured boundaries"},
      {"steady", "Steady-state density matrix"},
      {"dynamics", "Time evolution from a basis state"},
      {"gap", "Gap scans and (Omega, omega) surfaces"},
      {"optimize", "Maximize the gap over gamma0"},
      {"verify", "Run the oracle checks"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("--config", config_path, "flat JSON config")->required();
    sub->add_option("--set", sets, "key=value override (repeatable)");
    sub->add_option("--out", out_dir, "output directory")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  cli::RunConfig cfg;
  try {
    cfg = cli::load_config(config_path, sets);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitUsage;
  }
  try {
    return cli::run_command(name, cfg, out_dir, std::cout);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitCheckFailure;
  }
}
