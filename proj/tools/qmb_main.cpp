// Batch front end: runs one experiment from a JSON config and writes CSV
// data plus a manifest with full seed and parameter provenance.
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmb/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"quantum many-body toolkit batch runner"};
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "csv";
  std::string circuit_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--seed", seed, "seed override")->each([&](const std::string&) {
    seed_given = true;
  });
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--circuit", circuit_path, "circuit file (circuit method)");
  CLI11_PARSE(app, argc, argv);

  std::string command = argv[0] ? argv[0] : "qmb";
  for (int i = 1; i < argc; ++i) command += std::string(" ") + argv[i];

  try {
    const auto config = qmb::cli::load_config(config_path);
    qmb::cli::RunOptions opts;
    opts.out_dir = out_dir;
    opts.format = format;
    opts.circuit_path = circuit_path;
    opts.command_line = command;
    if (seed_given) opts.seed_override = seed;
    const auto manifest = qmb::cli::run_experiment(config, opts);
    for (const auto& file : manifest.outputs) std::cout << file << "\n";
    return 0;
  } catch (const qmb::cli::ConfigError& e) {
    nlohmann::json err;
    err["error"] = e.what();
    err["key"] = e.key();
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
