#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dunkl/rootsys.hpp"
#include "json.hpp"

namespace dunkl {

// Effective configuration of one CLI run: a JSON document with flag
// overrides applied.
struct SimConfig {
  std::string kind;  // subcommand
  Family family = Family::A;
  int n = 2;
  double beta = 2.0;
  Multiplicities k;
  std::size_t nsamples = 100000;
  std::size_t replicas = 1000;
  std::optional<double> dt;
  double t0 = 1e-2;
  double T = 1.0;
  std::optional<std::uint64_t> seed;
  std::string out;
  nlohmann::json parameters = nlohmann::json::object();
  std::string cache_dir;
  unsigned threads = 0;

  nlohmann::json to_json() const;
  std::string hash() const;
};

// Validates ranges; ConfigError on violation.
SimConfig config_from_json(const nlohmann::json& j);

// Exit codes: 0 ok, 1 config, 2 regime, 3 numeric failure.
int run(const SimConfig& config);

int run_cli(int argc, char** argv);

}  // namespace dunkl
