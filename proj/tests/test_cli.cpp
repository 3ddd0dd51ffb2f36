#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "fsi/config.hpp"
#include "fsi/errors.hpp"
#include "fsi/experiments.hpp"
#include "fsi/io.hpp"

using namespace fsi;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fsi_test_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config defaults and validation") {
  const RunConfig def = parse_config(json::object());
  CHECK(def.experiment == "validate");
  CHECK(def.geometry.n == 8);
  CHECK(def.rho == 0.0);
  CHECK(def.wants("csv"));

  CHECK(config_error({{"physics", {{"rho", -1}}}}).rfind("physics.rho", 0) == 0);
  CHECK(config_error({{"physics", {{"rho", "heavy"}}}}).rfind("physics.rho", 0) == 0);
  CHECK(config_error({{"geometry", {{"n", 1}}}}).rfind("geometry.n", 0) == 0);
  CHECK(config_error({{"geometry", {{"dim_mode", "torus"}}}}).rfind("geometry.dim_mode", 0) == 0);
  CHECK(config_error({{"experiment", {{"name", "fly"}}}}).rfind("experiment.name", 0) == 0);
  CHECK(config_error({{"experiment", {{"name", "simulate"}, {"t_final", -2}}}}).rfind("experiment.t_final", 0) == 0);
  CHECK(config_error({{"experiment", {{"name", "spectrum"}, {"t_final", 2}}}}).rfind("experiment.t_final", 0) == 0);
  CHECK(config_error({{"output", {{"formats", {"xml"}}}}}).rfind("output.formats", 0) == 0);
  CHECK(config_error({{"plotting", json::object()}}).rfind("config", 0) == 0);
  CHECK(config_error({{"experiment", {{"name", "lqr"}, {"locations", {{0.5, 0.5, 0.5}}}}}}).rfind("experiment.locations", 0) == 0);

  const RunConfig lqr = parse_config({{"experiment", {{"name", "lqr"}, {"locations", {{0.25}, {0.75}}}, {"weights", {1, 2}}}}});
  REQUIRE(lqr.lqr.locations.size() == 2);
  CHECK(lqr.lqr.locations[1][0] == 0.75);
  CHECK(lqr.lqr.weights == std::vector<double>{1.0, 2.0});
}

TEST_CASE("environment overrides only output and threads") {
  RunConfig cfg = parse_config(json::object());
  ::setenv("FSI_OUTPUT_DIR", "/tmp/elsewhere", 1);
  ::setenv("FSI_THREADS", "3", 1);
  ::setenv("FSI_RHO", "5", 1);
  apply_environment(cfg);
  CHECK(cfg.output_directory == "/tmp/elsewhere");
  CHECK(cfg.threads == 3);
  CHECK(cfg.rho == 0.0);
  ::setenv("FSI_THREADS", "zero", 1);
  CHECK_THROWS_AS(apply_environment(cfg), ConfigError);
  ::unsetenv("FSI_OUTPUT_DIR");
  ::unsetenv("FSI_THREADS");
  ::unsetenv("FSI_RHO");
}

TEST_CASE("coordinate format round trip") {
  const Generator gen = assemble_generator({DimMode::analogue2d, 4}, 1.0);
  std::stringstream s;
  write_coordinate(s, gen.a_red);
  std::string header;
  std::getline(s, header);
  Index nnz = 0;
  for (Index i = 0; i < gen.a_red.size(); ++i) nnz += gen.a_red.data()[i] != 0.0;
  CHECK(header == std::to_string(gen.reduced_size()) + " " + std::to_string(gen.reduced_size()) + " " +
                      std::to_string(nnz));
  s.seekg(0);
  const SparseMatrix back = read_coordinate(s);
  CHECK((MatrixXd(back) - gen.a_red).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937 rng(4);
  std::normal_distribution<double> normal;
  VectorXd z(gen.reduced_size());
  for (Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  const VectorXd direct = gen.a_red * z;
  CHECK((back * z - direct).norm() <= 1e-15 * direct.norm());

  std::stringstream sparse;
  write_coordinate(sparse, gen.disc->metric.mass);
  const SparseMatrix m = read_coordinate(sparse);
  CHECK(m.nonZeros() == gen.disc->metric.mass.nonZeros());
  CHECK((m - gen.disc->metric.mass).norm() == 0.0);

  std::stringstream bad("3 3 2\n0 0 1.5\n");
  CHECK_THROWS_AS(read_coordinate(bad), ConfigError);
  std::stringstream range("2 2 1\n5 0 1.0\n");
  CHECK_THROWS_AS(read_coordinate(range), ConfigError);
}

TEST_CASE("sha256") {
  const fs::path dir = scratch("hash");
  fs::create_directories(dir);
  std::ofstream(dir / "abc") << "abc";
  CHECK(sha256_hex(dir / "abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("dump at n=2 and the manifest") {
  RunConfig cfg = parse_config({{"geometry", {{"n", 2}}}});
  cfg.output_directory = scratch("dump").string();
  OutputWriter out(cfg.output_directory);
  dump_matrices(cfg, "all", out);
  write_manifest(cfg, "dump", {}, out);
  std::ifstream in(out.directory() / "generator.coo");
  Index rows = 0, cols = 0, nnz = 0;
  in >> rows >> cols >> nnz;
  Index lines = 0;
  for (Index i, j; in >> i >> j;) {
    double v;
    in >> v;
    ++lines;
  }
  CHECK(lines == nnz);
  const json manifest = json::parse(slurp(out.directory() / "manifest.json"));
  CHECK(manifest["files"].size() == out.files().size());
  for (const auto& f : manifest["files"]) {
    CHECK(f["sha256"] == sha256_hex(out.directory() / f["name"].get<std::string>()));
    CHECK(f["bytes"].get<std::uintmax_t>() == fs::file_size(out.directory() / f["name"].get<std::string>()));
  }
  CHECK(manifest["grid"]["n"] == 2);
  CHECK_THROWS_AS(dump_matrices(cfg, "pressure", out), ConfigError);
}

TEST_CASE("unwritable output directory") {
  const fs::path dir = scratch("blocked");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  CHECK_THROWS_AS(OutputWriter(dir / "file" / "sub"), ConfigError);
}

TEST_CASE("runs are reproducible") {
  for (const std::string name : {"validate", "sweep", "invert"}) {
    json doc = {{"geometry", {{"n", 4}}}, {"experiment", {{"name", name}, {"seed", 9}}}};
    if (name == "sweep") doc["experiment"]["threads"] = 1;
    RunConfig a = parse_config(doc);
    a.output_directory = scratch(name + "_a").string();
    RunConfig b = a;
    b.output_directory = scratch(name + "_b").string();
    if (name == "sweep") b.threads = 3;
    OutputWriter oa(a.output_directory), ob(b.output_directory);
    const RunOutcome ra = run_experiment(a, oa);
    const RunOutcome rb = run_experiment(b, ob);
    CHECK(ra.ok);
    REQUIRE(oa.files() == ob.files());
    for (const auto& f : oa.files()) CHECK(slurp(oa.directory() / f) == slurp(ob.directory() / f));
  }
}

TEST_CASE("sweep with a short beta range flags the boundary maximum") {
  RunConfig cfg = parse_config({{"geometry", {{"n", 8}}},
                                {"experiment", {{"name", "sweep"}, {"linear_points", 10}, {"log_points", 5}, {"beta_max", 20}}}});
  cfg.output_directory = scratch("short").string();
  OutputWriter out(cfg.output_directory);
  const RunOutcome r = run_experiment(cfg, out);
  CHECK(r.ok);
  CHECK(r.result["boundary_argmax_warning"] == true);
}
