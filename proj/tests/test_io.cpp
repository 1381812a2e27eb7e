#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "towermpc/io.hpp"

using namespace towermpc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("towermpc_io_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("double formatting round-trips") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, (i % 40) - 20);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1e300) == "1e+300");
}

TEST_CASE("simulation CSV round trip") {
  TempDir dir;
  SimResult r;
  for (int i = 0; i < 5; ++i) {
    r.t.push_back(0.01 * i);
    r.omega_r.push_back(0.7 + 1e-3 * i);
    r.psi.push_back(0.1 * i);
    r.x_dot.push_back(-0.3 * i);
    r.x.push_back(1.0 / 3.0 * i);
    r.wind.push_back(6.5);
    r.wind_hat.push_back(6.4);
    r.tau_g.push_back(1e4 + i);
    r.delta_tau.push_back(-123.456);
    r.power.push_back(1.5e6);
    r.a_y.push_back(2.0 + i);
    r.mpc_iterations.push_back(i);
    r.mpc_converged.push_back(i % 2);
    r.mpc_cost.push_back(0.25);
    r.mpc_dtheta_norm.push_back(1e3);
    r.mpc_sched_min.push_back(0.69);
    r.mpc_sched_max.push_back(0.71);
    r.mpc_clamped.push_back(0);
  }
  write_sim_csv(dir / "sim.csv", r);
  const CsvTable t = read_csv(dir / "sim.csv");
  CHECK(t.header.size() == 18);
  CHECK(t.header.front() == "t[s]");
  CHECK(t.rows.size() == 5);
  CHECK(t.values("x[m]") == r.x);
  CHECK(t.values("omega_r[rad/s]") == r.omega_r);
  CHECK(t.values("delta_tau_g[N m]") == r.delta_tau);
  CHECK(t.values("mpc_iterations[-]")[3] == 3.0);
  CHECK_THROWS_AS(t.column("nope"), IoError);
  const CsvTable mem = sim_csv_table(r);
  CHECK(mem.header == t.header);
  CHECK(mem.rows == t.rows);
}

TEST_CASE("grid CSV round trip is exact") {
  TempDir dir;
  const ModelGrid g = build_default_grid(QlpvSetup::nominal(), 1.0, 0.5, 0.9, 0.01);
  write_grid_csv(dir / "grid.csv", g);
  const ModelGrid h = read_grid_csv(dir / "grid.csv");
  CHECK(read_csv(dir / "grid.csv").header.size() == 90);
  REQUIRE(h.size() == g.size());
  CHECK(h.spacing() == g.spacing());
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(h[i].p == g[i].p);
    CHECK(h[i].ts == g[i].ts);
    CHECK(h[i].A == g[i].A);
    CHECK(h[i].B == g[i].B);
    CHECK(h[i].C == g[i].C);
    CHECK(h[i].Ad == g[i].Ad);
    CHECK(h[i].Bd == g[i].Bd);
    CHECK(h[i].x_off == g[i].x_off);
    CHECK(h[i].u_off == g[i].u_off);
    CHECK(h[i].y_off == g[i].y_off);
    CHECK(h[i].gains.k_wind == g[i].gains.k_wind);
  }
}

TEST_CASE("malformed files") {
  TempDir dir;
  CHECK_THROWS_AS(read_csv(dir / "missing.csv"), IoError);
  spit(dir / "empty.csv", "");
  CHECK_THROWS_AS(read_csv(dir / "empty.csv"), IoError);
  spit(dir / "ragged.csv", "a,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_csv(dir / "ragged.csv"), IoError);
  spit(dir / "text.csv", "a,b\n1,banana\n");
  CHECK_THROWS_AS(read_csv(dir / "text.csv"), IoError);
  spit(dir / "short_grid.csv", "p,ts\n0.7,1\n");
  CHECK_THROWS_AS(read_grid_csv(dir / "short_grid.csv"), IoError);

  // Duplicate scheduling points are rejected as a grid, not as a CSV.
  const ModelGrid g = build_default_grid(QlpvSetup::nominal(), 1.0, 0.7, 0.72, 0.01);
  write_grid_csv(dir / "g.csv", g);
  std::string text = slurp(dir / "g.csv");
  const auto first = text.find('\n') + 1;
  const auto second = text.find('\n', first) + 1;
  text.insert(second, text.substr(first, second - first));
  spit(dir / "dup.csv", text);
  CHECK_THROWS_AS(read_grid_csv(dir / "dup.csv"), IoError);
}

TEST_CASE("metadata sidecar format") {
  TempDir dir;
  write_metadata(dir / "run.meta", "run",
                 {{"case", "turbulent"}, {"Q", "0.1"}, {"Np", "25"}, {"iterate-every-step", "false"}},
                 {{"version", "0.1.0"}});
  const std::string s = slurp(dir / "run.meta");
  CHECK(s == "# version: 0.1.0\n[run]\ncase = \"turbulent\"\nQ = 0.1\nNp = 25\niterate-every-step = false\n");
}

TEST_CASE("auxiliary writers") {
  TempDir dir;
  Histogram h = histogram(std::vector<double>{-1.0, 0.2, 0.7, 2.0, 0.7}, uniform_edges(0.0, 1.0, 2));
  write_histogram_csv(dir / "h.csv", h);
  const CsvTable t = read_csv(dir / "h.csv");
  CHECK(t.rows.size() == 4);
  CHECK(std::isinf(t.rows.front()[0]));
  CHECK(t.values("count") == std::vector<double>{1, 1, 2, 1});

  write_cycles_csv(dir / "c.csv", CycleSet{{2.0, 0.5, 1.0}, {1.0, 0.0, 0.5}});
  CHECK(read_csv(dir / "c.csv").values("count[-]") == std::vector<double>{1.0, 0.5});

  const auto w = log_grid(0.1, 10.0, 21);
  write_bode_csv(dir / "b.csv", bode_nominal(TowerParams::nominal(), w),
                 {{1.1, bode_demod_amplitude(TowerParams::nominal(), 1.1, w)}});
  const CsvTable b = read_csv(dir / "b.csv");
  CHECK(b.header.size() == 4);
  CHECK(b.values("omega[rad/s]") == w);

  write_cycles_csv(dir / "nested" / "deeper" / "c.csv", CycleSet{});
  CHECK(fs::exists(dir / "nested" / "deeper" / "c.csv"));
  spit(dir / "plain", "x");
  CHECK_THROWS_AS(write_cycles_csv(dir / "plain" / "c.csv", CycleSet{}), IoError);
}
