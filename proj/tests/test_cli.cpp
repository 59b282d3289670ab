#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct ScratchDir {
  fs::path path = fs::temp_directory_path() / ("nhdeg_cli_test_" + std::to_string(getpid()));
  ScratchDir() { fs::create_directories(path); }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

const fs::path& workdir() {
  static const ScratchDir dir;
  return dir.path;
}

fs::path file(const std::string& name) { return workdir() / name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

// Runs the CLI with stdout and stderr captured to files; returns the exit code.
int run(const std::string& args, const std::string& tag = "last") {
  const std::string cmd = std::string("'") + NHDEG_CLI_PATH + "' " + args + " > '" + file(tag + ".stdout").string() +
                          "' 2> '" + file(tag + ".stderr").string() + "'";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const char* kSigmaZModel = R"({"name":"sz","bands":2,"terms":[{"mu":3,"coeff":[1,0],"factors":[]}]})";

}  // namespace

TEST_CASE("exit code matrix") {
  write(file("sz.json"), kSigmaZModel);
  write(file("inf.json"),
        R"({"name":"inf","bands":2,"terms":[{"mu":1,"coeff":[1e308,0],"factors":[]},)"
        R"({"mu":1,"coeff":[1e308,0],"factors":[]}]})");
  write(file("gen_bad.json"), "[[1, 0], [0]]");
  write(file("gen_nonunitary.json"), "[[2, 0], [0, 1]]");
  write(file("gen_id.json"), "[[1, 0], [0, [1, 0]]]");
  write(file("garbage.json"), "{ not json");

  const std::string sz = "'" + file("sz.json").string() + "'";
  struct Case {
    std::string args;
    int code;
  };
  const Case cases[] = {
      {"--help", 0},
      {"zoo-list", 0},
      {"bands -m zoo:pt-weyl-2b --path '0,0,0;1,1,1' --samples 3", 0},
      {"symcheck -m zoo:pt-weyl-2b --symmetry PT", 0},
      {"symcheck -m zoo:psh-dirac-4b --symmetry psH", 0},
      {"symcheck -m zoo:onp-2b --symmetry PT", 1},
      {"symcheck -m zoo:pt-weyl-2b --symmetry PT --generator '" + file("gen_id.json").string() + "'", 0},
      {"symcheck -m zoo:pt-weyl-2b --symmetry PT --generator '" + file("gen_bad.json").string() + "'", 2},
      {"symcheck -m zoo:pt-weyl-2b --symmetry PT --generator '" + file("gen_nonunitary.json").string() + "'", 2},
      {"symcheck -m zoo:pt-weyl-2b --symmetry PT --generator '" + file("garbage.json").string() + "'", 2},
      {"symcheck -m zoo:pt-weyl-2b --symmetry XY", 2},
      {"", 2},
      {"frobnicate", 2},
      {"scan", 2},
      {"bands -m zoo:nope --path '0,0,0;1,1,1'", 2},
      {"bands -m zoo:pt-weyl-2b?tz=1 --path '0,0,0;1,1,1'", 2},
      {"bands -m '" + file("missing.json").string() + "' --path '0,0,0;1,1,1'", 2},
      {"bands -m '" + file("garbage.json").string() + "' --path '0,0,0;1,1,1'", 2},
      {"bands -m zoo:pt-weyl-2b --path '0,0;1,1,1'", 2},
      {"bands -m zoo:pt-weyl-2b --path '0,0,0'", 2},
      {"bands -m zoo:pt-weyl-2b --path '0,0,a;1,1,1'", 2},
      {"surfaces -m zoo:pt-weyl-2b --field bogus", 2},
      {"surfaces -m zoo:pt-weyl-2b --field nu_R", 2},
      {"surfaces -m zoo:pt-weyl-2b --field eta_R --slice w=0", 2},
      {"obc -m zoo:pt-weyl-2b --sites 1", 2},
      {"obc -m zoo:pt-weyl-2b --axis y --sweep y", 2},
      {"classify -m zoo:pt-weyl-2b --k 0,0", 2},
      {"scan -m zoo:pt-weyl-2b --grid 2", 2},
      {"bands -m '" + file("inf.json").string() + "' --path '0,0,0;1,1,1'", 3},
  };
  for (const Case& c : cases) {
    CAPTURE(c.args);
    CHECK(run(c.args) == c.code);
  }
  // the numeric failure carries the offending matrix
  run("bands -m '" + file("inf.json").string() + "' --path '0,0,0;1,1,1'");
  const auto diag = nlohmann::json::parse(slurp(file("last.stderr")));
  CHECK(diag["error"] == "numeric_failure");
  CHECK(diag["matrix"].size() == 2);
  // invalid fields are listed
  run("surfaces -m zoo:pt-weyl-2b --field bogus");
  CHECK(slurp(file("last.stderr")).find("eta_R") != std::string::npos);
}

TEST_CASE("bands of a constant model are flat at +-1") {
  write(file("sz.json"), kSigmaZModel);
  REQUIRE(run("bands -m '" + file("sz.json").string() + "' --path '0,0,0;1,0,0;1,1,1' --samples 5") == 0);
  const auto rows = csv_rows(slurp(file("last.stdout")));
  CHECK(rows[0] == std::vector<std::string>{"arc_index", "kx", "ky", "kz", "band_index", "re_E", "im_E"});
  REQUIRE(rows.size() == 1 + 2 * 11);
  for (size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][5] == (rows[i][4] == "0" ? "-1" : "1"));
    CHECK(rows[i][6] == "0");
  }
  CHECK(rows.back()[0] == "10");
  CHECK(std::stod(rows.back()[1]) == doctest::Approx(3.141592653589793));
}

TEST_CASE("four-band bands come in degenerate pairs") {
  REQUIRE(run("bands -m zoo:psh-dirac-4b --path '0.1,0.1,0;0.1,0.1,1' --samples 20") == 0);
  const auto rows = csv_rows(slurp(file("last.stdout")));
  REQUIRE(rows.size() == 1 + 4 * 21);
  // every eigenvalue at a given k has a partner
  for (size_t i = 1; i + 3 < rows.size(); i += 4) {
    for (size_t a = i; a < i + 4; ++a) {
      int partners = 0;
      for (size_t b = i; b < i + 4; ++b)
        if (b != a && std::hypot(std::stod(rows[a][5]) - std::stod(rows[b][5]),
                                 std::stod(rows[a][6]) - std::stod(rows[b][6])) < 1e-8)
          ++partners;
      CHECK(partners >= 1);
    }
  }
}

TEST_CASE("scan output") {
  REQUIRE(run("scan -m zoo:pt-weyl-2b --out '" + file("pt.json").string() + "'") == 0);
  const auto doc = nlohmann::json::parse(slurp(file("pt.json")));
  REQUIRE(doc["records"].size() == 2);
  for (const auto& r : doc["records"]) {
    CHECK(r["kind"] == "non_defective_ep");
    CHECK(std::abs(std::abs(r["k_star"][2].get<double>()) - 3.141592653589793 / 2) < 1e-6);
  }
  CHECK(doc["nondefective_even"] == true);
  const auto man = nlohmann::json::parse(slurp(file("pt.json.manifest.json")));
  CHECK(man["command"] == "scan");
  CHECK(man["model"]["name"] == "pt-weyl-2b");
  CHECK(man["record_count"] == 2);
  CHECK(man.contains("tool_version"));
  CHECK(man.contains("wall_time_s"));

  REQUIRE(run("scan -m zoo:onp-2b --out '" + file("onp.json").string() + "'") == 0);
  const auto onp = nlohmann::json::parse(slurp(file("onp.json")));
  CHECK(onp["records"].size() == 8);
  for (const auto& r : onp["records"]) CHECK(r["kind"] == "onp");
}

TEST_CASE("payloads are byte-stable across runs and thread counts") {
  const std::string base = "scan -m 'zoo:pt-weyl-2b?lambda0=0.5' --grid 31";
  REQUIRE(run(base + " --threads 1 --out '" + file("a.json").string() + "'") == 0);
  REQUIRE(run(base + " --threads 4 --out '" + file("b.json").string() + "'") == 0);
  CHECK(slurp(file("a.json")) == slurp(file("b.json")));

  const std::string surf = "surfaces -m zoo:pt-weyl-2b --field d_yI --field eta_R --slice x=0 --grid 41";
  REQUIRE(run(surf + " --threads 1", "s1") == 0);
  REQUIRE(run(surf + " --threads 3", "s2") == 0);
  CHECK(slurp(file("s1.stdout")) == slurp(file("s2.stdout")));
  CHECK(slurp(file("s1.stdout")).size() > 100);
  // manifest goes to stderr when the payload goes to stdout
  CHECK(nlohmann::json::parse(slurp(file("s1.stderr")))["command"] == "surfaces");
}

TEST_CASE("replay reproduces the payload") {
  const fs::path out = file("obc.csv");
  REQUIRE(run("obc -m 'zoo:edge-2b?lambda0=2.3' --axis y --sites 30 --sweep x --steps 5 --out '" + out.string() +
              "'") == 0);
  const fs::path again = file("obc_again.csv");
  REQUIRE(run("replay '" + out.string() + ".manifest.json' --out '" + again.string() + "'") == 0);
  CHECK(slurp(out) == slurp(again));
  CHECK(fs::exists(again.string() + ".manifest.json"));

  REQUIRE(run("symcheck -m zoo:onp-2b --symmetry PT --out '" + file("sym.json").string() + "'") == 1);
  CHECK(run("replay '" + file("sym.json").string() + ".manifest.json' --out '" + file("sym2.json").string() + "'") ==
        1);
  CHECK(slurp(file("sym.json")) == slurp(file("sym2.json")));
  CHECK(run("replay '" + file("nope.json").string() + "'") == 2);
}

TEST_CASE("surfaces without zeros give a header only") {
  write(file("sz.json"), kSigmaZModel);
  REQUIRE(run("surfaces -m '" + file("sz.json").string() + "' --field d_zR --grid 11") == 0);
  CHECK(slurp(file("last.stdout")) == "kx,ky,kz,field\n");
}

TEST_CASE("obc rows and boundary flags") {
  write(file("sz.json"), kSigmaZModel);
  REQUIRE(run("obc -m '" + file("sz.json").string() + "' --sites 2 --steps 3") == 0);
  const auto rows = csv_rows(slurp(file("last.stdout")));
  CHECK(rows[0] == std::vector<std::string>{"sweep", "state_index", "re_E", "im_E", "edge_weight", "boundary"});
  CHECK(rows.size() == 1 + 3 * 4);

  // boundary states of the Hermitian edge model sit inside the bulk gap
  REQUIRE(run("obc -m zoo:edge-2b --axis y --sites 60 --sweep x --from 0.5 --to 0.5 --steps 1") == 0);
  int midgap = 0;
  for (const auto& r : csv_rows(slurp(file("last.stdout")))) {
    if (r[0] == "sweep") continue;
    const double e = std::abs(std::stod(r[2]));
    if (e < 0.5) {
      ++midgap;
      CHECK(r[5] == "1");
    } else {
      CHECK(e > 1.9);
    }
  }
  CHECK(midgap == 2);
}

TEST_CASE("classify and units of pi") {
  REQUIRE(run("classify -m 'zoo:psh-dirac-4b?k0=0.5pi' --k 0,0,0.5") == 0);
  const auto rec = nlohmann::json::parse(slurp(file("last.stdout")));
  CHECK(rec["kind"] == "non_defective_ep");
  CHECK(rec["order"] == 4);
  CHECK(rec["k_star"][2].get<double>() == doctest::Approx(3.141592653589793 / 2));
}
