// fsi_lab: command-line driver for the fluid-plate experiments.
//
//   fsi_lab run <config.json>
//   fsi_lab dump <config.json> [--target generator|metric|basis|all]
//   fsi_lab validate [config.json]
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.
// FSI_OUTPUT_DIR and FSI_THREADS override output.directory and experiment.threads.

#include <iostream>

#include <CLI11.hpp>

#include "fsi/config.hpp"
#include "fsi/errors.hpp"
#include "fsi/experiments.hpp"

namespace {

fsi::RunConfig read(const std::string& path) {
  fsi::RunConfig cfg = path.empty() ? fsi::parse_config(nlohmann::json::object()) : fsi::load_config(path);
  fsi::apply_environment(cfg);
  return cfg;
}

int run(fsi::RunConfig cfg, const std::string& command) {
  fsi::OutputWriter out(cfg.output_directory);
  const fsi::RunOutcome outcome = fsi::run_experiment(cfg, out);
  fsi::write_manifest(cfg, command, outcome, out);
  std::cout << outcome.result.dump(2) << '\n';
  if (outcome.result.value("boundary_argmax_warning", false))
    std::cerr << "warning: resolvent maximum sits at the last beta sample; raise experiment.beta_max\n";
  if (!outcome.ok) {
    std::cerr << "error: validation checks failed\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stokes flow coupled to an elastic plate: simulation, spectra, resolvents and LQR"};
  app.require_subcommand(1);

  std::string run_path;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment named in the config");
  run_cmd->add_option("config", run_path, "JSON config file")->required()->check(CLI::ExistingFile);

  std::string dump_path, target = "generator";
  auto* dump_cmd = app.add_subcommand("dump", "Write A_red, M_red or N in coordinate format");
  dump_cmd->add_option("config", dump_path, "JSON config file")->required()->check(CLI::ExistingFile);
  dump_cmd->add_option("--target", target, "generator, metric, basis or all")
      ->check(CLI::IsMember({"generator", "metric", "basis", "all"}));

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Run the invariant suite");
  validate_cmd->add_option("config", validate_path, "JSON config file (defaults when omitted)")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) return run(read(run_path), "run");
    if (*validate_cmd) {
      fsi::RunConfig cfg = read(validate_path);
      if (cfg.experiment != "validate") {
        nlohmann::json doc = cfg.source;
        doc["experiment"] = {{"name", "validate"}};
        if (cfg.source.contains("experiment") && cfg.source["experiment"].contains("seed"))
          doc["experiment"]["seed"] = cfg.source["experiment"]["seed"];
        cfg = fsi::parse_config(doc);
        fsi::apply_environment(cfg);
      }
      return run(cfg, "validate");
    }
    if (*dump_cmd) {
      const fsi::RunConfig cfg = read(dump_path);
      fsi::OutputWriter out(cfg.output_directory);
      fsi::dump_matrices(cfg, target, out);
      fsi::write_manifest(cfg, "dump", {}, out);
      for (const auto& f : out.files()) std::cout << (out.directory() / f).string() << '\n';
      return 0;
    }
  } catch (const fsi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const fsi::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
