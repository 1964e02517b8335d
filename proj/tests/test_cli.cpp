#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fatoulab/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  json summary;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = fatoulab::cli::run(std::move(args), out, err);
  std::string line = out.str();
  REQUIRE(std::count(line.begin(), line.end(), '\n') == 1);
  return {code, json::parse(line), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fatoulab_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("runaway from a JSON map spec") {
  const fs::path d = scratch("runaway");
  const Run r = run({"runaway", "--f", R"({"op":"affine","scale":[1,0],"shift":[1,0]})", "--K", "disc:0,0,1", "--out",
                     d.string()});
  CHECK(r.code == 0);
  CHECK(r.summary["status"] == "ok");
  CHECK(r.summary["N"] == 3);
  CHECK(fs::exists(d / "runaway.json"));
}

TEST_CASE("classify presets") {
  const fs::path d = scratch("classify");
  CHECK(run({"classify", "--preset", "harmonic", "--horizon", "5000", "--out", d.string()}).summary["verdict"] ==
        "Contracting");
  CHECK(run({"classify", "--preset", "geometric", "--out", d.string()}).summary["verdict"] == "SemiContracting");
  CHECK(fs::exists(d / "traces.csv"));
}

TEST_CASE("classify from a parameter file") {
  const fs::path d = scratch("classify_file");
  fs::create_directories(d);
  {
    std::ofstream o(d / "harmonic.txt");
    o.precision(17);
    for (int n = 1; n <= 5000; ++n) o << 1.0 - 1.0 / (n + 1) << " 0\n";
  }
  const Run r = run({"classify", "--params", (d / "harmonic.txt").string(), "--horizon", "5000", "--out", d.string()});
  CHECK(r.summary["verdict"] == "Contracting");
}

TEST_CASE("exit codes") {
  const fs::path d = scratch("codes");
  CHECK(run({"runaway", "--f", "poly:1,x", "--K", "disc:0,0,1", "--out", d.string()}).code == 1);
  CHECK(run({"runaway", "--K", "disc:0,0,1", "--out", d.string()}).code == 1);  // missing --f
  CHECK(run({"nonsense"}).code == 1);
  const Run nf = run({"runaway", "--f", "affine:0.5,0", "--K", "disc:0,0,1", "--n-max", "4", "--out", d.string()});
  CHECK(nf.code == 2);
  CHECK(nf.summary["kind"] == "NotFound");
  CHECK(run({"dw", "--f", "affine:i,0", "--out", d.string()}).code == 2);
}

TEST_CASE("config file fills options and names the command") {
  const fs::path d = scratch("config");
  fs::create_directories(d);
  {
    std::ofstream o(d / "cfg.json");
    o << R"({"command":"separation","f":"affine:1,2","K":"disc:0,0,0.75","L":"disc:0,0,0.5","seed":9})";
  }
  const Run r = run({"--config", (d / "cfg.json").string(), "--out", d.string()});
  CHECK(r.code == 0);
  CHECK(r.summary["m"] == 1);
  CHECK(r.summary["seed"] == 9);
  // command line wins over the config
  CHECK(run({"separation", "--config", (d / "cfg.json").string(), "--m-max", "0", "--out", d.string()}).code == 2);
}

TEST_CASE("render is byte-identical across runs") {
  const fs::path a = scratch("render_a"), b = scratch("render_b");
  const Run ra = run({"render", "--f", "poly:0,0,1", "--window", "-2,-2,2,2", "--res", "128", "--out", a.string()});
  const Run rb = run({"render", "--f", "poly:0,0,1", "--window", "-2,-2,2,2", "--res", "128", "--out", b.string()});
  CHECK(ra.code == 0);
  CHECK(ra.summary["fnv1a64"] == rb.summary["fnv1a64"]);
  CHECK(slurp(a / "render.pgm") == slurp(b / "render.pgm"));
}

TEST_CASE("weighted orbit CSV") {
  const fs::path d = scratch("worbit");
  const Run r = run({"weighted-orbit", "--f", "affine:1,1", "--omega", "var", "--g", "const:1", "--z", "1", "--n", "10",
                     "--out", d.string()});
  CHECK(r.summary["last"][0] == 3628800.0);
  const std::string csv = slurp(d / "weighted_orbit.csv");
  CHECK(csv.find("\n10,3628800,0,") != std::string::npos);
}

TEST_CASE("every command is listed") { CHECK(fatoulab::cli::commands().size() == 21); }
