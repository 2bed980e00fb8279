// Command-line driver: load a scenario, run it, write trace and metrics.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qdv/errors.hpp"
#include "qdv/scenario.hpp"
#include "qdv/simulator.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Distance-vector routing simulator with entanglement-assisted failure notification"};

  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> max_rounds;
  std::optional<std::string> trace_out;
  std::optional<std::string> metrics_out;
  std::optional<std::string> variant;
  bool quiet = false;

  app.add_option("--scenario", scenario_path, "Scenario file")->required();
  app.add_option("--seed", seed, "Override the scenario seed");
  app.add_option("--max-rounds", max_rounds, "Override the round limit")->check(CLI::PositiveNumber);
  app.add_option("--trace-out", trace_out, "Write the JSON-lines trace here");
  app.add_option("--metrics-out", metrics_out, "Write the metrics summary here");
  app.add_option("--variant", variant,
                 "plain, split_horizon, poisoned_reverse, gateway_sentinel or entangled_handshake");
  app.add_flag("--quiet", quiet, "Do not print the summary");
  CLI11_PARSE(app, argc, argv);

  try {
    qdv::ScenarioConfig config = qdv::load_scenario_file(scenario_path);
    if (seed) config.seed = *seed;
    if (max_rounds) config.max_rounds = *max_rounds;
    if (variant) {
      const auto v = qdv::parse_protocol_variant(*variant);
      if (!v) throw qdv::InputError("unknown variant '" + *variant + "'");
      config.variant = *v;
    }
    config.validate();

    const qdv::RunResult result = qdv::run(config);
    qdv::emit(result, trace_out, metrics_out);
    if (!quiet) std::cout << qdv::metrics_text(result.metrics);
  } catch (const qdv::ParseError& e) {
    std::cerr << scenario_path << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
