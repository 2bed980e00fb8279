// Recomputes a run's metrics summary from its trace file.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "replay/trace_replay.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Recompute run metrics from a trace"};
  std::string trace_path;
  app.add_option("trace", trace_path, "JSON-lines trace written by qdvsim")->required();
  CLI11_PARSE(app, argc, argv);

  std::ifstream in(trace_path);
  if (!in) {
    std::cerr << "error: cannot read '" << trace_path << "'\n";
    return 2;
  }
  try {
    std::cout << qdv::replay::replay_metrics(in).dump(2) << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
