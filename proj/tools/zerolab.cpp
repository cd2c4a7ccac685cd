// zerolab <command> --config PATH [--seed N] [--out DIR] [--deterministic]
//
// The command word replaces [run] command from the file. ZEROLAB_SEED
// overrides the file seed and --seed overrides both.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "zerolab/commands.hpp"
#include "zerolab/config.hpp"

namespace {

std::optional<zerolab::Command> command_from(const std::string& word) {
  using zerolab::Command;
  for (Command c : {Command::Bergman, Command::Sample, Command::Equidist, Command::Moderate, Command::Constants,
                    Command::Approx})
    if (zerolab::to_string(c) == word) return c;
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zerolab: random zero divisors on P^1 and P^2"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  for (const char* name : {"bergman", "sample", "equidist", "moderate", "constants", "approx"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " pipeline");
    sub->add_option("--config", config_path, "config file")->required();
    sub->add_option("--seed", seed, "override the seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_flag("--deterministic", deterministic, "omit timing fields from the artifacts");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : zerolab::kExitError;
  }
  const std::string word = app.get_subcommands().front()->get_name();

  try {
    zerolab::RunConfig cfg = zerolab::load_config(config_path);
    cfg.command = *command_from(word);
    if (const char* env = std::getenv("ZEROLAB_SEED")) {
      try {
        cfg.experiment.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw zerolab::Error(zerolab::ErrorCode::ValidationError, std::string("ZEROLAB_SEED is not an integer: ") + env);
      }
    }
    if (seed) cfg.experiment.seed = *seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (deterministic) cfg.experiment.deterministic = true;
    const int code = zerolab::run_command(cfg);
    std::cout << "config_hash " << zerolab::config_hash(cfg) << " seed " << cfg.experiment.seed << " exit " << code
              << "\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << zerolab::error_json(e).dump(2) << "\n";
    return zerolab::kExitError;
  }
}
