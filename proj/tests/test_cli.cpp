#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cfo/cli.hpp"
#include "cfo/trace_io.hpp"
#include "doctest.h"

using namespace cfo;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("cfo_cli_" + std::to_string(::getpid()) + "_" +
                                       std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return dir / name;
  }
  static inline int counter = 0;
};

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cfo_sim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

const char* kTriangle = R"(topology = edges
num_agents = 3
edges = 1-2, 1-3, 2-3
sigma = 1
l_max = 200
)";

}  // namespace

TEST_CASE("triangle run reports the oracle spectral radius") {
  Scratch s;
  const auto cfg = s.write("triangle.cfg", kTriangle);
  CHECK(cli({"--config", cfg.string(), "--algo", "lsbp", "--oracle", "--out", s.dir.string()}) == kExitOk);
  std::ifstream js(s.dir / "summary.json");
  const Summary sum = read_summary_json(js);
  REQUIRE(sum.rho_k.has_value());
  CHECK(*sum.rho_k == doctest::Approx(0.3820).epsilon(1e-4));
  CHECK(sum.converged_at.has_value());
}

TEST_CASE("zero iterations writes only the initial rows") {
  Scratch s;
  const auto cfg = s.write("triangle.cfg", kTriangle);
  CHECK(cli({"--config", cfg.string(), "--iters", "0", "--out", s.dir.string()}) == kExitOk);
  std::ifstream csv(s.dir / "trace.csv");
  const auto rows = read_trace_csv(csv);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].iteration == 0);
}

TEST_CASE("validation failures exit with code 2") {
  Scratch s;
  const auto bad = s.write("bad.cfg", std::string(kTriangle) + "timeline = 3 leave 1\n");
  CHECK(cli({"--config", bad.string(), "--out", s.dir.string()}) == kExitValidation);
  const auto unknown = s.write("unknown.cfg", "colour = blue\n");
  CHECK(cli({"--config", unknown.string(), "--out", s.dir.string()}) == kExitValidation);
  CHECK(cli({"--config", (s.dir / "missing.cfg").string()}) == kExitValidation);
  CHECK(cli({"--pdr", "2", "--config", s.write("ok.cfg", kTriangle).string()}) == kExitValidation);
}

TEST_CASE("unanchored topology exits with code 4") {
  Scratch s;
  const auto cfg = s.write("split.cfg", R"(topology = edges
num_agents = 4
edges = 1-2, 3-4
oracle = true
l_max = 5
)");
  CHECK(cli({"--config", cfg.string(), "--out", s.dir.string()}) == kExitNumeric);
}

TEST_CASE("emit selects output files") {
  Scratch s;
  const auto cfg = s.write("triangle.cfg", kTriangle);
  CHECK(cli({"--config", cfg.string(), "--emit", "json", "--out", s.dir.string()}) == kExitOk);
  CHECK(fs::exists(s.dir / "summary.json"));
  CHECK_FALSE(fs::exists(s.dir / "trace.csv"));
}
