#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "dunkl/cli.hpp"
#include "dunkl/errors.hpp"
#include "dunkl/io.hpp"

using namespace dunkl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dunkl_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dunkl");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("shortest round-trip formatting") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("config hash") {
  const nlohmann::json a = {{"x", 1}, {"y", {1, 2}}};
  nlohmann::json b = a;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b["x"] = 2;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("csv and json headers") {
  const fs::path csv = scratch("t.csv");
  {
    CsvWriter w(csv, "abc", {"a", "b"});
    w << 1.5 << std::string("x");
    w.end_row();
  }
  std::ifstream in(csv);
  std::string l1, l2, l3, l4;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  std::getline(in, l4);
  CHECK(l1 == "# generator: dunkl");
  CHECK(l2 == "# config_hash: abc");
  CHECK(l3 == "a,b");
  CHECK(l4 == "1.5,x");
  const fs::path js = scratch("t.json");
  write_json(js, {{"v", 3}}, "abc");
  const auto j = read_json(js);
  CHECK(j["v"] == 3);
  CHECK(j["header"]["config_hash"] == "abc");
  CHECK_THROWS_AS(read_json(scratch("missing.json")), ConfigError);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config_from_json({{"experiment", {{"kind", "dance"}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"experiment", {{"kind", "rates"}}}, {"system", {{"beta", -1.0}}}}),
                  ConfigError);
  const SimConfig c = config_from_json({{"experiment", {{"kind", "rates"}}},
                                        {"system", {{"family", "B"}, {"N", 3}, {"beta", 4.0}}},
                                        {"seed", 5}});
  CHECK(c.family == Family::B);
  CHECK(c.n == 3);
  CHECK(c.seed == 5u);
  CHECK(c.out == "rates.json");
  CHECK(config_from_json(c.to_json()).hash() == c.hash());
}

TEST_CASE("exit codes") {
  const std::string out = scratch("rates.json").string();
  const std::string cache = scratch("cache").string();
  CHECK(cli({"rates", "--n", "3", "--beta", "1", "--seed", "1", "--cache-dir", cache, "--out", out}) == 2);
  CHECK(cli({"rates", "--n", "3", "--beta", "4", "--cache-dir", cache, "--out", out}) == 1);
  CHECK(cli({"rates", "--beta", "4", "--samples", "abc"}) == 1);
  CHECK(cli({"bogus"}) == 1);
  CHECK(cli({"rates", "--n", "3", "--beta", "4", "--samples", "2000", "--seed", "1", "--cache-dir", cache, "--out",
             out}) == 0);
  const auto j = read_json(out);
  CHECK(j["entries"].size() == 3);
  CHECK(j["header"]["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("closed-form subcommands run without a seed") {
  const std::string freeze = scratch("freeze.json").string();
  CHECK(cli({"freeze", "--n", "3", "--out", freeze}) == 0);
  const auto j = read_json(freeze);
  CHECK(j["pf_spectrum"]["half_multiplicity"] == 2);
  const std::string phase = scratch("phase.csv").string();
  CHECK(cli({"phase", "--system", "A", "--beta", "2", "--n-min", "2", "--n-max", "6", "--out", phase}) == 0);
  CHECK(fs::exists(phase));
}

TEST_CASE("config file with flag overrides") {
  const fs::path cfg = scratch("cfg.json");
  std::ofstream(cfg) << R"({"system": {"family": "A", "N": 2, "beta": 4.0},
                            "experiment": {"kind": "relax", "parameters": {"ratio": 1000, "points": 7}},
                            "sampling": {"replicas": 500}, "seed": 3})";
  const std::string out = scratch("relax.csv").string();
  CHECK(cli({"relax", "--config", cfg.string(), "--frozen", "--out", out}) == 0);
  std::ifstream in(out);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) rows += line.rfind('#', 0) != 0;
  CHECK(rows == 1 + 7 * 2);
}
