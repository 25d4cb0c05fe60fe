#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "thbq/error.hpp"
#include "thbq/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical spline experiments"};
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON experiment description")->required();
  app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
  app.add_option("--seed", seed, "Random seed (overrides seed)");
  app.add_flag("--quiet", quiet, "Suppress progress output");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  thbq::ExperimentConfig cfg;
  try {
    cfg = thbq::read_experiment(config_path);
  } catch (const thbq::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  if (out_dir) cfg.output_dir = *out_dir;
  if (seed) cfg.seed = *seed;

  try {
    const thbq::ExperimentResult r = thbq::run_experiment(cfg, quiet ? nullptr : &std::cout);
    if (!quiet) {
      for (const auto& a : r.artifacts) std::cout << "wrote " << a << "\n";
      std::cout << cfg.kind << ": " << r.summary << "\n";
    }
    return r.exit_code;
  } catch (const thbq::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const thbq::InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
