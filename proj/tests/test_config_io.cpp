#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lzs/config.hpp"
#include "lzs/io.hpp"

using namespace lzs;

TEST_CASE("empty document gives defaults") {
  const RunConfig c = parse_config("");
  CHECK(c.pulse.duration == 5.0);
  CHECK(c.pulse.cep == doctest::Approx(M_PI / 2.0));
  CHECK(c.pulse.photon_energy == 1.55);
  CHECK(c.material.fermi_velocity == 1.0);
  CHECK(std::isinf(c.t2));
  CHECK(c.tolerance == 1e-10);
  CHECK(c.grid.gamma.count == 120);
  CHECK(c.current_gamma_count == 60);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("expressions, sections and units") {
  const RunConfig c = parse_config(
      "# comment\n"
      "pulse.cep = pi/2\n"
      "[pulse]\n"
      "duration = 0.01 ps   ; inline comment\n"
      "gdd = 180.8 fs^2\n"
      "peak_field = 20 MV/cm\n"
      "[material]\n"
      "gap = 1550 meV\n"
      "[dephasing]\n"
      "t2 = off\n"
      "[grid]\n"
      "m_count = 2 * (3 + 4)\n");
  CHECK(c.pulse.cep == doctest::Approx(1.5707963).epsilon(1e-7));
  CHECK(c.pulse.duration == doctest::Approx(10.0));
  CHECK(c.pulse.gdd == 180.8);
  CHECK(c.pulse.peak_field == doctest::Approx(2.0));
  CHECK(c.material.gap == doctest::Approx(1.55));
  CHECK(std::isinf(c.t2));
  CHECK(c.grid.m.count == 14);
}

TEST_CASE("errors carry line and column") {
  auto expect = [](const char* text, std::size_t line, std::size_t col, const char* needle) {
    try {
      parse_config(text);
      FAIL("no error for: " << text);
    } catch (const ConfigError& e) {
      CHECK(e.line() == line);
      CHECK(e.column() == col);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect("pulse.duration = -5\n", 1, 18, "pulse.duration");
  expect("\n\n  pulse.durration = 5\n", 3, 3, "unknown key");
  expect("pulse.duration = 5 eV\n", 1, 20, "unit 'eV'");
  expect("[grid]\nm_count = 2.5\n", 2, 11, "integer");
  expect("pulse.cep = (1 + \n", 1, 17, "");
  expect("just words\n", 1, 1, "key = value");
}

TEST_CASE("overrides") {
  RunConfig c;
  apply_override(c, "gamma=0.2");
  apply_override(c, "M=2.2");
  apply_override(c, "grid.k0_points = 129");
  CHECK(c.point_gamma == 0.2);
  CHECK(c.point_m == 2.2);
  CHECK(c.grid.k_policy.points == 129);
  const WorkingPoint wp = c.resolved_point();
  CHECK(wp.material.gap == doctest::Approx(2.2 * 1.55));
  CHECK_THROWS_AS(apply_override(c, "nonsense=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "gamma"), ConfigError);

  RunConfig half;
  apply_override(half, "gamma=0.2");
  CHECK_THROWS_AS(half.resolved_point(), ValidationError);
}

TEST_CASE("canonical text round trip and hash scope") {
  RunConfig c = parse_config("pulse.cep = pi/3\npulse.tod = 137.3\ndephasing.t2 = 3\npoint.gamma = 0.7\n"
                             "point.m = 1.1\nengine.workers = 4\noutput.dir = \"x y\"\n");
  const std::string text = canonical_text(c);
  const RunConfig back = parse_config(text);
  CHECK(canonical_text(back) == text);
  CHECK(back.pulse.cep == c.pulse.cep);
  CHECK(back.output_dir == "x y");
  CHECK(config_hash(back) == config_hash(c));

  RunConfig w = c;
  w.workers = 1;
  w.output_dir = "elsewhere";
  w.stop_after = 3;
  CHECK(config_hash(w) == config_hash(c));
  w.grid.m.count = 7;
  CHECK(config_hash(w) != config_hash(c));
  CHECK(hashed_text(c).find("engine.workers") == std::string::npos);
}

TEST_CASE("manifest re-parses to the same config") {
  RunConfig c;
  apply_override(c, "pulse.gdd=180.8");
  apply_override(c, "grid.m_count=9");
  const std::string m = manifest_text(c, "sweep-map", {"wall_time_s: 1.5", "note: a = b"});
  CHECK(canonical_text(parse_config(m)) == canonical_text(c));
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  for (double v : {M_PI, -1.0 / 3.0, 6.02214076e23, 1.234567891234e-7}) {
    const double back = std::strtod(format_number(v).c_str(), nullptr);
    CHECK(std::abs(back - v) <= 5e-9 * std::abs(v));
    CHECK(format_number(back) == format_number(v));
  }
}

TEST_CASE("map csv layout") {
  MapResult map;
  map.grid.gamma = {0.5, 1.0, 2};
  map.grid.m = {1.0, 2.0, 2};
  for (int i = 0; i < 4; ++i) {
    MapCell c;
    c.gamma = i < 2 ? 0.5 : 1.0;
    c.m = (i % 2) ? 2.0 : 1.0;
    c.rho_cb_res = 0.25 * i;
    c.status = CellStatus::Done;
    map.cells.push_back(c);
  }
  map.cells[3].status = CellStatus::Failed;
  map.cells[3].reason = "norm drift";
  RunConfig cfg;
  const std::string csv = map_csv(map, cfg);
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "gamma,M,E0_Vnm,rho_cb_res,j_res_e_per_fs,regime,flags");
  CHECK(rows[2].rfind("0.5,2,", 0) == 0);
  CHECK(rows[4].find("FAILED") != std::string::npos);
  CHECK(csv.rfind("# kind: population\n", 0) == 0);

  bool listed = false;
  for (const auto& l : map_metadata(map)) listed = listed || l.find("norm drift") != std::string::npos;
  CHECK(listed);
  CHECK(map_csv(map, cfg) == csv);
}

TEST_CASE("emit_map writes both files") {
  const auto dir = std::filesystem::temp_directory_path() / "lzs_test_emit";
  std::filesystem::remove_all(dir);
  MapResult map;
  map.grid.gamma = {1.0, 1.0, 1};
  map.grid.m = {1.0, 1.0, 1};
  map.cells.resize(1);
  emit_map(map, RunConfig{}, dir, "sweep-map");
  CHECK(std::filesystem::exists(dir / "map.csv"));
  CHECK(std::filesystem::exists(dir / "manifest.txt"));
  std::filesystem::remove_all(dir);
}
