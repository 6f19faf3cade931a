// Drives the command-line binary as a subprocess: exit codes, CSV shape,
// byte-stable reruns. PLATESHAPE_CLI_PATH is injected by the build.

#include <doctest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "plateshape_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run_cli(const std::string& args, const std::string& stdout_file = "") {
  std::string cmd = std::string("\"") + PLATESHAPE_CLI_PATH + "\" " + args;
  cmd += stdout_file.empty() ? " >/dev/null" : (" >\"" + stdout_file + "\"");
  cmd += " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  os << text;
  return p;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

const char* kSpectrumConfig = R"({"domain":"square","nx":6,"count":3,"t":0.1})";

}  // namespace

TEST_CASE("spectrum writes a well-formed ascending csv") {
  const fs::path cfg = write_config("spectrum.json", kSpectrumConfig);
  const fs::path out = scratch() / "spectrum_run";
  const fs::path log = scratch() / "spectrum_stdout.txt";
  REQUIRE(run_cli("spectrum --config \"" + cfg.string() + "\" --out \"" +
                  out.string() + "\"",
                  log.string()) == 0);

  // stdout lists the produced files
  CHECK(slurp(log) == (out / "spectrum.csv").string() + "\n");

  const auto lines = lines_of(slurp(out / "spectrum.csv"));
  REQUIRE(lines.size() == 9);  // 5 header lines, column row, 3 data rows
  CHECK(lines[0].starts_with("# config: {\"count\":3,\"domain\":\"square\""));
  CHECK(lines[1].starts_with("# inputs-hash: "));
  CHECK(lines[1].size() == std::string("# inputs-hash: ").size() + 16);
  CHECK(lines[2].starts_with("# tests: "));
  CHECK(lines[3].starts_with("# material: t=0.1 "));
  CHECK(lines[4].starts_with("# mesh: "));
  CHECK(lines[5] == "n,gamma,residual");
  double prev = 0.0;
  for (int i = 0; i < 3; ++i) {
    std::stringstream row(lines[6 + i]);
    std::string n, g, r;
    std::getline(row, n, ',');
    std::getline(row, g, ',');
    std::getline(row, r, ',');
    CHECK(n == std::to_string(i + 1));
    const double gamma = std::stod(g);
    CHECK(gamma > 0.0);
    // the square's modes 2 and 3 are a symmetry pair, equal to print precision
    CHECK(gamma >= prev * (1.0 - 1e-12));
    prev = gamma;
    CHECK(std::stod(r) <= 1e-9 * std::max(1.0, gamma));
  }
}

TEST_CASE("reruns are byte-identical and the seed only moves the hash") {
  const fs::path cfg = write_config("rerun.json", kSpectrumConfig);
  const fs::path out_a = scratch() / "rerun_a";
  const fs::path out_b = scratch() / "rerun_b";
  const fs::path out_c = scratch() / "rerun_c";
  const std::string base = " --config \"" + cfg.string() + "\" --out \"";
  REQUIRE(run_cli("spectrum" + base + out_a.string() + "\"") == 0);
  REQUIRE(run_cli("spectrum" + base + out_b.string() + "\"") == 0);
  const std::string text_a = slurp(out_a / "spectrum.csv");
  CHECK(text_a == slurp(out_b / "spectrum.csv"));

  REQUIRE(run_cli("spectrum" + base + out_c.string() + "\" --seed 5") == 0);
  const auto lines_a = lines_of(text_a);
  const auto lines_c = lines_of(slurp(out_c / "spectrum.csv"));
  REQUIRE(lines_a.size() == lines_c.size());
  for (size_t i = 0; i < lines_a.size(); ++i) {
    if (i == 1)
      CHECK(lines_a[i] != lines_c[i]);  // inputs-hash folds the seed in
    else
      CHECK(lines_a[i] == lines_c[i]);
  }
}

TEST_CASE("usage errors exit with code 2") {
  const fs::path cfg = write_config("ok.json", kSpectrumConfig);
  const std::string cfg_arg = " --config \"" + cfg.string() + "\"";
  const std::string out_arg = " --out \"" + (scratch() / "errs").string() + "\"";

  CHECK(run_cli("frobnicate" + cfg_arg) == 2);  // unknown subcommand
  CHECK(run_cli("spectrum" + out_arg) == 2);    // --config is required
  CHECK(run_cli("spectrum --config \"" + (scratch() / "absent.json").string() +
                "\"" + out_arg) == 2);

  const fs::path bad_json = write_config("bad.json", "{\"domain\":");
  CHECK(run_cli("spectrum --config \"" + bad_json.string() + "\"" + out_arg) == 2);

  const fs::path bad_key = write_config(
      "bad_key.json", R"({"domain":"square","nx":6,"whatnot":1})");
  CHECK(run_cli("spectrum --config \"" + bad_key.string() + "\"" + out_arg) == 2);

  const fs::path bad_type =
      write_config("bad_type.json", R"({"domain":"square","count":"three"})");
  CHECK(run_cli("spectrum --config \"" + bad_type.string() + "\"" + out_arg) == 2);

  const fs::path bad_domain = write_config("bad_domain.json", R"({"domain":"hexagon"})");
  CHECK(run_cli("spectrum --config \"" + bad_domain.string() + "\"" + out_arg) == 2);
}

TEST_CASE("numerical failures exit with code 3") {
  // An elliptical stretch of amplitude 1.5 flips the triangle orientation,
  // which the mesh mapper rejects as a degenerate diffeomorphism.
  const fs::path cfg = write_config(
      "flip.json",
      R"({"domain":"square","nx":6,"count":2,"family":"elliptical","amps":"1.5"})");
  CHECK(run_cli("stability --config \"" + cfg.string() + "\" --out \"" +
                (scratch() / "flip").string() + "\"") == 3);
}
