#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "app/commands.hpp"
#include "app/run_config.hpp"
#include "conekit/error.hpp"

int main(int argc, char** argv) {
  using namespace conekit::app;
  CLI::App cli{"conekit: Cahn-Hilliard laboratory on conic surfaces of revolution"};
  cli.set_version_flag("--version", std::string(CONEKIT_VERSION));
  std::string command;
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir = "runs";
  bool allow_out_of_window = false;
  bool quiet = false;
  cli.add_option("command", command, "Subcommand")->required()->check(CLI::IsMember(command_names()));
  cli.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  cli.add_option("--set", sets, "Override, e.g. --set geometry.M=128 (repeatable)");
  cli.add_option("--out", out_dir, "Parent directory for run directories");
  cli.add_flag("--allow-out-of-window", allow_out_of_window, "Accept gamma outside the CH window with a warning");
  cli.add_flag("-q,--quiet", quiet, "Suppress the human-readable tables");
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  RunConfig cfg;
  try {
    Assignments assignments;
    if (!config_path.empty()) assignments = read_config_file(config_path);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw conekit::ValidationError("--set expects key=value, got '" + s + "'");
      assignments.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    cfg = parse_config(assignments, allow_out_of_window);
  } catch (const conekit::ValidationError& e) {
    std::cerr << "conekit: " << e.what() << '\n';
    return kExitValidation;
  }
  for (const auto& w : cfg.warnings) std::cerr << "conekit: warning: " << w << '\n';

  try {
    RunContext ctx;
    ctx.out_base = out_dir;
    ctx.log = quiet ? nullptr : &std::cout;
    const auto result = dispatch(command, cfg, ctx);
    std::cout << "run directory: " << result.run_dir.string() << '\n';
    if (result.exit_code != kExitOk) std::cerr << "conekit: " << result.status << '\n';
    return result.exit_code;
  } catch (const conekit::ValidationError& e) {
    std::cerr << "conekit: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "conekit: " << e.what() << '\n';
    return 1;
  }
}
