// End-to-end checks of the fblab binary: exit codes and deterministic reruns.
// The binary path and the shipped config directory come in as compile
// definitions so the tests run from any build tree.
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FBL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("fbl_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kTinyConfig =
    "[problem]\n"
    "dim = 1\n"
    "x_lo = 0\n"
    "x_hi = 1\n"
    "n = 17\n"
    "G = plap:2\n"
    "lambda_plus = 1\n"
    "phi = 0.1*x\n"
    "[solve]\n"
    "seed = 3\n";

}  // namespace

TEST_CASE("verify exit codes: pass, found failure, usage error") {
  CHECK(run_cli("verify --fn plap:2") == 0);
  CHECK(run_cli("verify --fn plap:2 --nl power-F:1.5") == 0);
  CHECK(run_cli("verify --fn plap:2 --delta0 1.5 --g0 2.0") == 1);
  CHECK(run_cli("verify --fn nosuch:1") == 2);
  CHECK(run_cli("verify") == 2);
}

TEST_CASE("solve rejects underresolved grids and broken configs") {
  const fs::path dir = fresh_dir("reject");
  write_file(dir / "n2.ini",
             "[problem]\ndim = 1\nx_lo = 0\nx_hi = 1\nn = 2\nG = plap:2\nphi = x\n");
  CHECK(run_cli("solve --config " + (dir / "n2.ini").string() + " --out " +
                (dir / "out").string()) == 2);
  CHECK(run_cli("solve --config " + (dir / "missing.ini").string()) == 2);
  write_file(dir / "noprobe.ini", kTinyConfig);
  CHECK(run_cli("probe --config " + (dir / "noprobe.ini").string() + " --out " +
                (dir / "out2").string()) == 2);
}

TEST_CASE("shipped fixture configs solve and probe cleanly") {
  const fs::path dir = fresh_dir("fixtures");
  const std::string cfgs = FBL_CONFIG_DIR;
  CHECK(run_cli("probe --config " + cfgs + "/deadcore_1d.ini --out " +
                (dir / "deadcore").string()) == 0);
  CHECK(fs::exists(dir / "deadcore" / "field.csv"));
  CHECK(fs::exists(dir / "deadcore" / "manifest.txt"));
  CHECK(fs::exists(dir / "deadcore" / "probe_growth.csv"));
}

TEST_CASE("deterministic reruns are bit-identical") {
  const fs::path dir = fresh_dir("determinism");
  write_file(dir / "tiny.ini", kTinyConfig);
  const std::string base = "solve --config " + (dir / "tiny.ini").string() +
                           " --deterministic --out ";
  REQUIRE(run_cli(base + (dir / "a").string()) == 0);
  REQUIRE(run_cli(base + (dir / "b").string()) == 0);
  CHECK(slurp(dir / "a" / "field.csv") == slurp(dir / "b" / "field.csv"));
  CHECK(slurp(dir / "a" / "manifest.txt") == slurp(dir / "b" / "manifest.txt"));
}
