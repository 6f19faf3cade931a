#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "plateshape/experiments.hpp"

int main(int argc, char** argv) {
  if (const char* env = std::getenv("PLATESHAPE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) Eigen::setNbThreads(n);
  }

  CLI::App app{
      "plateshape: clamped Reissner-Mindlin plate spectra under shape "
      "perturbations (eigenvalues, shape derivatives, atlas-distance studies)"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;

  for (const std::string& name : plateshape::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the '" + name + "' experiment");
    sub->add_option("--config", config_path, "flat JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory (default: cwd)");
    sub->add_option("--seed", seed, "seed folded into seeded sub-procedures");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::ifstream is(config_path);
  if (!is) {
    std::cerr << "usage error: cannot read config file '" << config_path << "'\n";
    return 2;
  }
  std::stringstream buffer;
  buffer << is.rdbuf();

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const auto files =
        plateshape::run_experiment(name, buffer.str(), out_dir, seed);
    for (const auto& f : files) std::cout << f << "\n";
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
