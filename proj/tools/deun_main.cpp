// deun <command> <model-file> [options]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "deun/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Expected utility evaluation for directed expected utility networks"};
  app.set_version_flag("--version", "deun 0.1.0");

  deun::RunConfig cfg;
  std::string model_path, method, output;
  std::uint64_t samples = 0;

  app.add_option("command", cfg.command, "validate | decompose | jtree | expand | evaluate | rank | oracle")
      ->required()
      ->check(CLI::IsMember(deun::kCommands));
  app.add_option("model", model_path, "model file (JSON)")->required();
  app.add_option("--decision", cfg.decision, "restrict evaluate/oracle to one decision");
  app.add_option("--method", method, "theorem1 or jtree (default: jtree when decomposable)")
      ->check(CLI::IsMember({"theorem1", "jtree"}));
  auto* mc = app.add_option("--mc-samples", samples, "Monte Carlo samples for oracle")
                 ->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Monte Carlo seed (default 0)");
  app.add_option("--output", output, "write the report to this file instead of stdout");
  app.add_flag("--structured", cfg.structured, "emit the report as JSON");
  app.add_flag("--clamp", cfg.clamp, "oracle: clamp samples into the attribute domains");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  cfg.model_path = model_path;
  if (!method.empty()) cfg.method = deun::parse_method(method);
  if (*mc) cfg.mc_samples = samples;
  if (!output.empty()) cfg.output_path = output;
  return deun::run(cfg, std::cout, std::cerr);
}
