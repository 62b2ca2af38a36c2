#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nsplab/config.hpp"
#include "nsplab/grid_io.hpp"
#include "nsplab/report.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

using namespace nsplab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = "io_test_scratch";
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("g17 formatting round-trips doubles") {
  CHECK(format_g17(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_g17(2.5) == "2.5");
  CHECK(format_g17(0.0) == "0");

  for (double v : {1.0 / 3.0, kPi, 1e-300, 1e300, 6.9200910919446004e-7, -0.125,
                   2.2250738585072014e-308}) {
    const std::string s = format_g17(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("csv rendering follows the quoting rules") {
  CsvTable t;
  t.header = {"t", "name"};
  t.rows = {{"1.5", "plain"},
            {"2.5", "a,b"},
            {"3.5", "say \"hi\""},
            {"4.5", "multi\nline"}};
  CHECK(render_csv(t) ==
        "t,name\n"
        "1.5,plain\n"
        "2.5,\"a,b\"\n"
        "3.5,\"say \"\"hi\"\"\"\n"
        "4.5,\"multi\nline\"\n");

  CsvTable empty;
  empty.header = {"a", "b"};
  CHECK(render_csv(empty) == "a,b\n");

  CsvTable numeric;
  numeric.header = {"x", "y"};
  numeric.add_numeric_row({1.0 / 3.0, 2.5});
  CHECK(render_csv(numeric) == "x,y\n0.33333333333333331,2.5\n");

  CsvTable ragged;
  ragged.header = {"a", "b"};
  ragged.rows = {{"only"}};
  CHECK_THROWS_AS(render_csv(ragged), std::invalid_argument);
}

TEST_CASE("grid files: round trip, raw layout, guards") {
  const fs::path dir = scratch_dir();
  const fs::path path = dir / "field.grid";

  GridFile g;
  g.dims = {2, 3, 4};
  g.data.resize(24);
  std::mt19937_64 rng(5u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& z : g.data) z = Complex(u(rng), u(rng));

  write_grid_file(path, g);
  CHECK_FALSE(fs::exists(dir / "field.grid.tmp"));

  const GridFile back = read_grid_file(path);
  CHECK(back.dims == g.dims);
  REQUIRE(back.data.size() == g.data.size());
  for (size_t i = 0; i < g.data.size(); ++i) CHECK(back.data[i] == g.data[i]);

  // Raw bytes: 3 x u64 header, then interleaved re/im doubles.
  const std::string raw = slurp(path);
  REQUIRE(raw.size() == 24 + 24 * 16);
  std::uint64_t nx = 0;
  std::memcpy(&nx, raw.data(), 8);
  CHECK(nx == 2);
  std::uint64_t nz = 0;
  std::memcpy(&nz, raw.data() + 16, 8);
  CHECK(nz == 4);
  double re0 = 0.0, im0 = 0.0;
  std::memcpy(&re0, raw.data() + 24, 8);
  std::memcpy(&im0, raw.data() + 32, 8);
  CHECK(re0 == g.data[0].real());
  CHECK(im0 == g.data[0].imag());

  // Overwriting an existing artifact goes through the same rename.
  GridFile tiny;
  tiny.dims = {1, 1, 1};
  tiny.data = {Complex(7.0, -7.0)};
  write_grid_file(path, tiny);
  CHECK(read_grid_file(path).data[0] == Complex(7.0, -7.0));

  GridFile mismatch;
  mismatch.dims = {2, 2, 2};
  mismatch.data.resize(3);
  CHECK_THROWS_AS(write_grid_file(dir / "bad.grid", mismatch), std::invalid_argument);

  write_grid_file(path, g);
  fs::resize_file(path, 24 + 5);
  try {
    read_grid_file(path);
    FAIL("expected a truncated-payload error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("truncated payload") != std::string::npos);
  }
  fs::resize_file(path, 10);
  try {
    read_grid_file(path);
    FAIL("expected a truncated-header error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("truncated header") != std::string::npos);
  }
  CHECK_THROWS_AS(read_grid_file(dir / "missing.grid"), std::runtime_error);

  GridFile none;
  write_grid_file(dir / "empty.grid", none);
  CHECK(read_grid_file(dir / "empty.grid").data.empty());
}

TEST_CASE("atomic text writes") {
  const fs::path dir = scratch_dir();
  const fs::path path = dir / "report.json";
  atomic_write_text(path, "first\n");
  CHECK(slurp(path) == "first\n");
  atomic_write_text(path, "second\n");
  CHECK(slurp(path) == "second\n");
  CHECK_FALSE(fs::exists(dir / "report.json.tmp"));
}

TEST_CASE("config: minimal document and defaults") {
  const Config cfg = parse_config(R"({"experiment":{"kind":"eigen"}})");
  CHECK(cfg.kind == ExperimentKind::eigen);
  CHECK(cfg.params.mu == 1.0);
  CHECK(cfg.params.poisson);
  CHECK(cfg.eigen.samples == 241);
  CHECK(cfg.output_dir == ".");
  CHECK(cfg.hash != 0);
  CHECK(cfg.echo.contains("experiment"));

  const Config sim = parse_config(
      R"({"experiment":{"kind":"simulate","n":16,"dt":0.1,"t_end":1,"seed":999,
          "initial":"seeded","eps":1e-3}})");
  CHECK(sim.simulate.grid.n == 16);
  CHECK(sim.simulate.stepper.dt == 0.1);
  CHECK(sim.simulate.seed == 999);
  CHECK(sim.simulate.initial == "seeded");

  const Config out = parse_config(
      R"({"experiment":{"kind":"decay"},"output":{"directory":"artifacts"}})");
  CHECK(out.output_dir == "artifacts");
  CHECK(out.decay.window.t_min == 1e2);
  CHECK(out.decay.window.t_max == 1e4);
  CHECK(out.decay.k_values == std::vector<int>{0});

  const Config kl = parse_config(
      R"({"experiment":{"kind":"kernel-lp","lp":[2,"inf"],"alpha":[0,1]}})");
  REQUIRE(kl.kernel_lp.lp.size() == 2);
  CHECK(kl.kernel_lp.lp[0] == 2.0);
  CHECK(std::isinf(kl.kernel_lp.lp[1]));
  CHECK(kl.kernel_lp.alpha == std::vector<int>{0, 1});
}

TEST_CASE("config: rejection paths carry the JSON pointer") {
  auto reject = [](const char* text, const char* want) {
    try {
      parse_config(text);
      FAIL_CHECK("expected rejection: " << want);
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()) == want);
    }
  };

  reject(R"([])", "config /: expected an object");
  reject(R"({"experiment":{"kind":"eigen"},"extra":{}})", "config /extra: unknown key");
  reject(R"({"params":{"mu":-1},"experiment":{"kind":"eigen"}})",
         "config /params/mu: mu must be > 0");
  reject(R"({"params":{"nu":-1},"experiment":{"kind":"eigen"}})",
         "config /params/nu: (2/3)mu + nu must be >= 0");
  reject(R"({"experiment":{"kind":"eigen","foo":1}})",
         "config /experiment/foo: unknown key");
  reject(R"({"experiment":{}})", "config /experiment/kind: required string");
  reject(R"({"experiment":{"kind":"banana"}})",
         "config /experiment/kind: unknown kind \"banana\"");
  reject(R"({"experiment":{"kind":"eigen","samples":8}})",
         "config /experiment/samples: need >= 16 samples");
  reject(R"({"experiment":{"kind":"decay","window":[10,1]}})",
         "config /experiment/window: need 0 < t_min < t_max");
  reject(R"({"experiment":{"kind":"decay","k_values":[1,0]}})",
         "config /experiment/k_values: first entry must be 0");
  reject(R"({"experiment":{"kind":"kernel-lp","lp":[1.5]}})",
         "config /experiment/lp: need p >= 2");
  reject(R"({"experiment":{"kind":"kernel-lp","alpha":[3]}})",
         "config /experiment/alpha: alpha must be in [0, 2]");
  reject(R"({"experiment":{"kind":"simulate","n":12}})",
         "config /experiment: GridSpec: n must be a power of two in [8, 64]");
  reject(R"({"experiment":{"kind":"simulate","initial":"zeros"}})",
         "config /experiment/initial: must be \"trig\" or \"seeded\"");
  reject(R"({"experiment":{"kind":"eigen"},"output":{"formats":["xml"]}})",
         "config /output/formats: entries must be \"csv\" or \"json\"");

  CHECK_THROWS_AS(parse_config("{oops"), std::invalid_argument);
}

TEST_CASE("config hashing is canonical") {
  const Config a = parse_config(
      R"({"params":{"mu":1.0,"nu":0.0},"experiment":{"kind":"eigen","samples":61}})");
  const Config b = parse_config(
      R"({"experiment":{"samples":61,"kind":"eigen"},"params":{"nu":0.0,"mu":1.0}})");
  CHECK(a.hash == b.hash);

  const Config c = parse_config(
      R"({"params":{"mu":1.0,"nu":0.0},"experiment":{"kind":"eigen","samples":62}})");
  CHECK(a.hash != c.hash);

  nlohmann::ordered_json j = nlohmann::ordered_json::parse(R"({"b":1,"a":[2,true]})");
  CHECK(canonical_json(j) == R"({"a":[2,true],"b":1})");
}

TEST_CASE("fnv1a and hex formatting pins") {
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(hash_hex(fnv1a("")) == "cbf29ce484222325");
  CHECK(hash_hex(0) == "0000000000000000");
  CHECK(timestamp_utc().size() == 16);  // YYYYMMDDTHHMMSSZ
}

TEST_CASE("manifest serialization keeps a stable field order") {
  RunManifest m;
  m.run_id = "20260815T000000Z-cbf29ce48422";
  m.kind = "eigen";
  m.config_hash = "cbf29ce484222325";
  m.ok = true;
  m.artifacts = {"eigen.csv", "eigen_report.json"};
  m.config_echo = nlohmann::ordered_json::object();

  const nlohmann::ordered_json j = m.to_json();
  const std::vector<std::string> keys = {"run_id", "kind",         "config_hash", "version",
                                         "ok",     "wall_seconds", "artifacts",   "config"};
  size_t i = 0;
  for (auto it = j.begin(); it != j.end(); ++it, ++i) {
    REQUIRE(i < keys.size());
    CHECK(it.key() == keys[i]);
  }
  CHECK(j["version"] == std::string(kToolVersion));
  CHECK_FALSE(j.contains("error"));

  RunManifest bad = m;
  bad.ok = false;
  bad.error = "boom";
  CHECK(bad.to_json().contains("error"));
}
