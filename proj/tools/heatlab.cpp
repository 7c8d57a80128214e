// heatlab: command-line front end for the experiment harness.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heatlab/experiments.hpp"

namespace {

std::vector<unsigned> parse_bits(const std::string& list) {
  std::vector<unsigned> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const unsigned long v = std::stoul(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<unsigned>(v));
    } catch (const std::exception&) {
      heatlab::fail(heatlab::ErrorKind::kConfigInvalid, "bad --bits entry '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pointwise and shrinking-interval controllability of the 1D heat equation"};
  app.require_subcommand(1);
  std::string config_path, out_dir, bits_list;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  bool seed_set = false;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"classify", "minimal control time of the anchor point"},
      {"obs-sweep", "observability constants over the eps grid and their rate fit"},
      {"control", "moment and HUM controls, blow-up and averaging diagnostics"},
      {"lemmas", "eps sequence, sine-integral inequality and biorthogonal growth"},
      {"all", "every task above"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed")->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--bits", bits_list, "precision ladder, e.g. 128,256,512");
    sub->add_option("--jobs", jobs, "worker threads");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : heatlab::kExitConfig;
  }

  std::string cmd;
  for (const auto* sub : app.get_subcommands()) cmd = sub->get_name();

  heatlab::ExperimentConfig config;
  try {
    if (!config_path.empty()) config = heatlab::load_config(config_path);
    if (!out_dir.empty()) config.out = out_dir;
    if (seed_set) config.seed = seed;
    if (!bits_list.empty()) config.bits = parse_bits(bits_list);
    if (jobs > 0) config.jobs = jobs;
    heatlab::validate(config);
  } catch (const heatlab::Error& e) {
    std::cerr << e.what() << "\n";
    return heatlab::kExitConfig;
  }
  return heatlab::run_command(cmd, config);
}
