#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bdisac/config_io.hpp"
#include "bdisac/results_io.hpp"
#include "test_util.hpp"

using namespace bdisac;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bdisac_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ParetoCurve small_curve(std::uint64_t seed) {
  SceneConfig cfg = testing::desk_config(2, 6, 3, seed);
  cfg.noise_sensing = 1e-10;
  cfg.noise_comm = 1e-8;
  const Scene scene = make_scene(cfg);
  const std::vector<double> levels = default_level_grid(scene, ProblemMode::SensingMax, 3);
  return sweep_pareto(scene, levels, ProblemMode::SensingMax, Scheme::Spp);
}

}  // namespace

TEST_CASE("empty config yields the default parameter table") {
  const SceneConfig cfg = parse_config("");
  CHECK(cfg.total_power == doctest::Approx(1e-3));  // 0 dBm
  CHECK(cfg.bds.count == 50);
  CHECK(cfg.grid.num_subcarriers == 128);
  CHECK(cfg.grid.symbol_duration == doctest::Approx(4.1470e-6));
  CHECK(cfg.grid.subcarrier_spacing == doctest::Approx(1.0 / 4.1470e-6));
  CHECK(cfg.bs_target_distance == doctest::Approx(8.0));
  CHECK(cfg.bs_user_distance == doctest::Approx(10.0));
  CHECK(cfg.bds.attenuation == doctest::Approx(0.5));
  CHECK(cfg.bds.activity_min == doctest::Approx(0.1));
  CHECK(cfg.bds.activity_max == doctest::Approx(0.5));
  CHECK(cfg.carrier_frequency == doctest::Approx(28e9));
}

TEST_CASE("config overrides and diagnostics") {
  SUBCASE("zero BDs is a valid scene") {
    const SceneConfig cfg = parse_config("bd_count = 0\n");
    CHECK(cfg.bds.count == 0);
  }

  SUBCASE("negative power is rejected with the invariant named") {
    try {
      parse_config("total_power = -1\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("total_power must be > 0") != std::string::npos);
    }
  }

  SUBCASE("unknown keys name the line") {
    try {
      parse_config("num_symbols = 4\nbogus_key = 3\n", "test.cfg");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("test.cfg:2") != std::string::npos);
      CHECK(msg.find("bogus_key") != std::string::npos);
    }
  }

  SUBCASE("malformed numbers name line and key") {
    try {
      parse_config("noise_comm = or so\n", "x");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("x:1") != std::string::npos);
    }
  }

  SUBCASE("bad enum value") {
    CHECK_THROWS_AS(parse_config("geometry = sideways\n"), ConfigError);
  }

  SUBCASE("line without an equals sign") {
    CHECK_THROWS_AS(parse_config("what is this\n"), ConfigError);
  }

  SUBCASE("comments and blank lines are fine") {
    const SceneConfig cfg = parse_config("# scene\n\nbd_count = 7 # seven\n");
    CHECK(cfg.bds.count == 7);
  }
}

TEST_CASE("config format round trip") {
  SceneConfig cfg = testing::desk_config(4, 16, 9, 77);
  cfg.comm_sensing_weight = 0.3;
  cfg.geometry = Geometry::Bistatic;
  cfg.bds.host = BdHost::Target;
  const SceneConfig back = parse_config(format_config(cfg));
  CHECK(back.grid.num_symbols == cfg.grid.num_symbols);
  CHECK(back.bds.count == cfg.bds.count);
  CHECK(back.comm_sensing_weight == doctest::Approx(cfg.comm_sensing_weight));
  CHECK(back.geometry == Geometry::Bistatic);
  CHECK(back.bds.host == BdHost::Target);
  CHECK(back.total_power == doctest::Approx(cfg.total_power).epsilon(1e-12));
}

TEST_CASE("schema text lists every parse key") {
  const std::string schema = config_schema_text();
  for (const std::string key :
       {"num_symbols", "bd_count", "total_power_dbm", "noise_sensing",
        "comm_sensing_weight", "sca_delta", "geometry", "carrier_frequency"})
    CHECK(schema.find(key) != std::string::npos);
}

TEST_CASE("empty sweep emits a header-only curve") {
  const fs::path dir = temp_dir("empty");
  emit_results(ParetoCurve{}, dir.string());
  CHECK(slurp(dir / "curve.csv") ==
        "scheme,mode,constraint_level,I_r,C_d,converged,outer_iters,seed,wall_ms\n");
  CHECK(read_curve_csv((dir / "curve.csv").string()).empty());
}

TEST_CASE("results round trip at 12 significant digits") {
  const ParetoCurve curve = small_curve(5);
  const fs::path dir = temp_dir("roundtrip");
  emit_results(curve, dir.string());

  const auto records = read_curve_csv((dir / "curve.csv").string());
  REQUIRE(records.size() == curve.records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].scheme == curve.records[i].scheme);
    CHECK(records[i].mode == curve.records[i].mode);
    // 12 significant digits both ways
    CHECK(format_double(records[i].smi) == format_double(curve.records[i].smi));
    CHECK(format_double(records[i].rate) == format_double(curve.records[i].rate));
    CHECK(format_double(records[i].level) == format_double(curve.records[i].level));
    CHECK(records[i].seed == curve.records[i].seed);
  }

  // one trace per run, with the expected header
  for (size_t i = 0; i < curve.runs.size(); ++i) {
    const std::string trace = slurp(dir / ("trace_" + std::to_string(i) + ".csv"));
    CHECK(trace.rfind("outer_iter,block,I_r,C_d,lambda,rho\n", 0) == 0);
    CHECK(trace.find("power") != std::string::npos);
  }

  CHECK(slurp(dir / "summary.json").find("boundary") != std::string::npos);
}

TEST_CASE("identical curves serialize byte-identically modulo wall time") {
  const ParetoCurve a = small_curve(9);
  const ParetoCurve b = small_curve(9);
  const fs::path da = temp_dir("repro_a");
  const fs::path db = temp_dir("repro_b");
  emit_results(a, da.string());
  emit_results(b, db.string());

  auto strip_wall = [](std::string text) {
    std::string out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
      const auto pos = line.rfind(',');
      out += line.substr(0, pos) + "\n";
    }
    return out;
  };
  CHECK(strip_wall(slurp(da / "curve.csv")) == strip_wall(slurp(db / "curve.csv")));
  CHECK(slurp(da / "trace_0.csv") == slurp(db / "trace_0.csv"));
}

TEST_CASE("plot tables keep the caller's series order") {
  const fs::path dir = temp_dir("plot");
  const ParetoCurve k0 = small_curve(11);
  const ParetoCurve k50 = small_curve(12);
  const ParetoCurve k200 = small_curve(13);
  emit_results(k0, (dir / "k0").string());
  emit_results(k50, (dir / "k50").string());
  emit_results(k200, (dir / "k200").string());

  const fs::path out = dir / "boundary.csv";
  plot_data({(dir / "k0" / "curve.csv").string(), (dir / "k50" / "curve.csv").string(),
             (dir / "k200" / "curve.csv").string()},
            {"K=0", "K=50", "K=200"}, out.string(), true);

  const std::string table = slurp(out);
  CHECK(table.rfind("series,x,y\n", 0) == 0);
  const auto p0 = table.find("K=0");
  const auto p50 = table.find("K=50");
  const auto p200 = table.find("K=200");
  REQUIRE(p0 != std::string::npos);
  REQUIRE(p50 != std::string::npos);
  REQUIRE(p200 != std::string::npos);
  CHECK(p0 < p50);
  CHECK(p50 < p200);
  CHECK(fs::exists(dir / "boundary.svg"));

  // missing series tolerated
  plot_data({(dir / "k0" / "curve.csv").string(), (dir / "nope" / "curve.csv").string()},
            {"a", "b"}, (dir / "partial.csv").string());
  CHECK(slurp(dir / "partial.csv").find("a,") != std::string::npos);
}

TEST_CASE("cost table matches the cost model pointwise") {
  const fs::path dir = temp_dir("cost");
  const fs::path out = dir / "cost.csv";
  emit_cost_table(0, 200, 41, 2.0, 1.0, out.string());
  std::ifstream in(out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,ris,bd_spp,bd_sp");
  int rows = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string f;
    std::vector<double> v;
    while (std::getline(ss, f, ',')) v.push_back(std::stod(f));
    REQUIRE(v.size() == 4);
    const CostTriple c = cost_model(v[0], 2.0, 1.0);
    CHECK(v[1] == doctest::Approx(c.ris).epsilon(1e-11));
    CHECK(v[2] == doctest::Approx(c.bd_spp).epsilon(1e-11));
    CHECK(v[3] == doctest::Approx(c.bd_sp).epsilon(1e-11));
    ++rows;
  }
  CHECK(rows == 41);
}

TEST_CASE("manifest serializes the reproduction inputs") {
  RunManifest m;
  m.command = "sweep";
  m.config_path = "scene.cfg";
  m.output_dir = "out";
  m.seeds = {1, 2};
  m.schemes = {"spp", "nobd"};
  m.levels = {0.5, 1.5};
  m.mode = "p1";
  const std::string text = format_manifest(m);
  CHECK(text.find("\"command\": \"sweep\"") != std::string::npos);
  CHECK(text.find("nobd") != std::string::npos);

  const fs::path dir = temp_dir("manifest");
  write_manifest(m, dir.string());
  CHECK(slurp(dir / "manifest.json") == text);
}
