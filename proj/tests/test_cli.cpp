#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(PACSIM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pacsim_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string slurp(const fs::path& p) {
  std::ostringstream s;
  s << std::ifstream(p).rdbuf();
  return s.str();
}

const char* kSimulateConfig = R"({
  "field_modulus": 2,
  "n": 3,
  "p_X": [0.7, 0.3],
  "W": {"type": "bsc", "crossover": 0.2},
  "tie_rule": "lexicographic",
  "seed": 11,
  "R": 0.3,
  "R_A": 0.7,
  "encoder": {"source": "random"},
  "adversary": {"strategy": "identity"},
  "trials": 400
})";

}  // namespace

TEST_CASE("cli rejects missing and malformed configs") {
  const fs::path dir = fresh_dir("bad");
  CHECK(run_cli("simulate --config " + (dir / "absent.json").string() +
                " --out " + (dir / "o").string()) == 2);

  write_file(dir / "not_json.json", "{ nope");
  CHECK(run_cli("simulate --config " + (dir / "not_json.json").string() +
                " --out " + (dir / "o").string()) == 2);

  // composite modulus
  write_file(dir / "bad_field.json", R"({
    "field_modulus": 4, "n": 2, "p_X": [0.5, 0.5],
    "W": {"type": "bsc", "crossover": 0.1},
    "seed": 1, "R": 0.4, "trials": 10
  })");
  CHECK(run_cli("simulate --config " + (dir / "bad_field.json").string() +
                " --out " + (dir / "o").string()) == 2);

  // channel row does not normalize
  write_file(dir / "bad_rows.json", R"({
    "field_modulus": 2, "n": 2, "p_X": [0.5, 0.5],
    "W": {"rows": [[0.7, 0.2], [0.5, 0.5]]},
    "seed": 1, "R": 0.4, "trials": 10
  })");
  CHECK(run_cli("simulate --config " + (dir / "bad_rows.json").string() +
                " --out " + (dir / "o").string()) == 2);

  // missing the required trials field
  write_file(dir / "no_trials.json", R"({
    "field_modulus": 2, "n": 2, "p_X": [0.5, 0.5],
    "W": {"type": "bsc", "crossover": 0.1},
    "seed": 1, "R": 0.4
  })");
  CHECK(run_cli("simulate --config " + (dir / "no_trials.json").string() +
                " --out " + (dir / "o").string()) == 2);
}

TEST_CASE("simulate writes artifacts and replays byte-identically") {
  const fs::path dir = fresh_dir("sim");
  write_file(dir / "cfg.json", kSimulateConfig);
  const std::string cfg = (dir / "cfg.json").string();

  CHECK(run_cli("simulate --config " + cfg + " --out " +
                (dir / "run1").string()) == 0);
  CHECK(fs::exists(dir / "run1" / "results.csv"));
  CHECK(fs::exists(dir / "run1" / "results.json"));
  CHECK(fs::exists(dir / "run1" / "report.txt"));

  CHECK(run_cli("simulate --config " + cfg + " --out " +
                (dir / "run2").string()) == 0);
  CHECK(slurp(dir / "run1" / "results.csv") ==
        slurp(dir / "run2" / "results.csv"));
  CHECK(slurp(dir / "run1" / "results.json") ==
        slurp(dir / "run2" / "results.json"));

  // a different seed changes the outcome stream
  CHECK(run_cli("simulate --config " + cfg + " --seed 99 --out " +
                (dir / "run3").string()) == 0);
  CHECK(slurp(dir / "run1" / "results.csv") !=
        slurp(dir / "run3" / "results.csv"));
}

TEST_CASE("leakage command honors the adversary rate class") {
  const fs::path dir = fresh_dir("leak");
  write_file(dir / "cfg.json", R"({
    "field_modulus": 2, "n": 2, "p_X": [0.5, 0.5],
    "W": {"type": "bsc", "crossover": 0.1},
    "seed": 3, "R": 0.35, "R_A": 0.7,
    "encoder": {"source": "random"},
    "adversary": {"strategy": "identity"}
  })");
  CHECK(run_cli("leakage --config " + (dir / "cfg.json").string() + " --out " +
                (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "results.csv"));

  // identity adversary exceeds a tiny rate budget: config error
  write_file(dir / "tight.json", R"({
    "field_modulus": 2, "n": 2, "p_X": [0.5, 0.5],
    "W": {"type": "bsc", "crossover": 0.1},
    "seed": 3, "R": 0.35, "R_A": 0.1,
    "encoder": {"source": "random"},
    "adversary": {"strategy": "identity"}
  })");
  CHECK(run_cli("leakage --config " + (dir / "tight.json").string() +
                " --out " + (dir / "out2").string()) == 2);
}

TEST_CASE("verify command passes its internal checks") {
  const fs::path dir = fresh_dir("verify");
  write_file(dir / "cfg.json", R"({
    "field_modulus": 2, "n": 2, "p_X": [0.5, 0.5],
    "W": {"type": "bsc", "crossover": 0.2},
    "seed": 7, "R": 0.35, "R_A": 0.7,
    "adversary": {"strategy": "identity"}
  })");
  CHECK(run_cli("verify --config " + (dir / "cfg.json").string() + " --out " +
                (dir / "out").string()) == 0);
  const std::string report = slurp(dir / "out" / "report.txt");
  CHECK(report.find("FAIL") == std::string::npos);
  CHECK(report.find("PASS") != std::string::npos);

  // worker count must not change any byte of the artifacts
  CHECK(run_cli("verify --config " + (dir / "cfg.json").string() +
                " --workers 1 --out " + (dir / "out1").string()) == 0);
  CHECK(slurp(dir / "out" / "results.csv") ==
        slurp(dir / "out1" / "results.csv"));
}

TEST_CASE("resource caps map to their own exit code") {
  const fs::path dir = fresh_dir("cap");
  write_file(dir / "cfg.json", R"({
    "field_modulus": 2, "n": 8, "p_X": [0.5, 0.5],
    "W": {"type": "bsc", "crossover": 0.1},
    "seed": 5, "R": 0.6, "R_A": 0.7, "cap": 64,
    "encoder": {"source": "random"},
    "adversary": {"strategy": "identity"}
  })");
  CHECK(run_cli("leakage --config " + (dir / "cfg.json").string() + " --out " +
                (dir / "out").string()) == 3);
}
