#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "bnk/config.hpp"
#include "bnk/csvlog.hpp"
#include "bnk/initial.hpp"
#include "bnk/snapshot.hpp"
#include "doctest.h"

using namespace bnk;

namespace {

bool same_config(const RunConfig& a, const RunConfig& b) {
  if (a.c_phi != b.c_phi || a.gamma != b.gamma || a.b_value != b.b_value) return false;
  if (a.b_table != b.b_table) return false;
  if (a.d != b.d || a.N != b.N || a.V != b.V) return false;
  const InitialSpec &x = a.initial, &y = b.initial;
  if (x.family != y.family || x.amplitude != y.amplitude || x.sigma != y.sigma ||
      x.radius != y.radius || x.s != y.s || x.beta != y.beta || x.mu != y.mu) {
    return false;
  }
  if (x.center.d != y.center.d) return false;
  for (int k = 0; k < x.center.d; ++k) {
    if (x.center[k] != y.center[k]) return false;
  }
  if (a.n != b.n || a.segments != b.segments || a.practical_dt != b.practical_dt ||
      a.blowup_ceiling != b.blowup_ceiling) {
    return false;
  }
  if (a.s != b.s || a.r0_override != b.r0_override ||
      a.hyperplane_directions != b.hyperplane_directions ||
      a.hyperplane_offsets != b.hyperplane_offsets ||
      a.gamma_stride != b.gamma_stride) {
    return false;
  }
  if (a.out_dir != b.out_dir || a.snapshot_cadence != b.snapshot_cadence ||
      a.csv_digits != b.csv_digits) {
    return false;
  }
  return a.subcritical_mode == b.subcritical_mode && a.seed == b.seed &&
         a.threads == b.threads;
}

TimeSeries small_series() {
  TimeSeries s;
  for (int i = 0; i < 3; ++i) {
    s.times.push_back(0.01 * i);
    MomentsRecord r;
    r.m0 = 1.0 + 0.1 * i;
    r.m1 = vec3(0.001 * i, -0.002 * i, 1.0 / 3.0);
    r.m2 = 3.0 - 0.01 * i;
    r.m2_plus_gamma = 4.5 + 0.2 * i;
    r.entropy = 0.7 * i;
    r.linf = 0.1;
    r.gamma_conc = 1e-3 * i;
    s.records.push_back(r);
    DriftRecord dr;
    dr.mass_weak = 1e-16 * i;
    dr.energy_weak = -2e-15 * i;
    dr.mass_strong = 1e-4 * i;
    dr.energy_strong = 3e-4 * i;
    s.drifts.push_back(dr);
  }
  return s;
}

}  // namespace

TEST_CASE("empty config text yields the documented defaults") {
  const RunConfig c = parse_config("");
  CHECK(c.c_phi == 1.0);
  CHECK(c.gamma == 1.0);
  CHECK(c.b_value == 1.0);
  CHECK(c.b_table.empty());
  CHECK(c.d == 3);
  CHECK(c.N == 16);
  CHECK(c.V == 6.0);
  CHECK(c.initial.family == "gaussian");
  CHECK(c.initial.center.d == 3);
  CHECK(c.initial.center[0] == 0.0);
  CHECK(c.n == 4);
  CHECK(c.segments == 1);
  CHECK(c.practical_dt == 0.0);
  CHECK(c.blowup_ceiling == 100.0);
  CHECK(c.s == 4.0);
  CHECK(c.hyperplane_directions == 16);
  CHECK(c.hyperplane_offsets == 9);
  CHECK(c.gamma_stride == 1);
  CHECK(c.out_dir == "out");
  CHECK(c.snapshot_cadence == 0);
  CHECK(c.csv_digits == 15);
  CHECK(c.subcritical_mode == SubcriticalMode::kSelfConsistent);
  CHECK(c.seed == 17);
  CHECK(c.threads == 1);
}

TEST_CASE("full config parses every section") {
  const std::string text =
      "# run card\n"
      "[kernel]\n"
      "c_phi = 0.5\n"
      "gamma = 0.25\n"
      "b_table = 0:1, 0.5:1.25, 1:2\n"
      "\n"
      "[grid]\n"
      "d = 3\n"
      "N = 12\n"
      "V = 4.5\n"
      "\n"
      "[initial]\n"
      "family = bose\n"
      "beta = 2\n"
      "mu = -0.8\n"
      "center = 0.25 -0.5 0\n"
      "\n"
      "[scheme]\n"
      "n = 2\n"
      "segments = 3\n"
      "practical_dt = 0.001\n"
      "blowup_ceiling = 1.5\n"
      "\n"
      "[diagnostics]\n"
      "s = 3.5\n"
      "gamma_stride = 2\n"
      "\n"
      "[io]\n"
      "out_dir = runs/alpha\n"
      "snapshot_cadence = 5\n"
      "csv_digits = 17\n"
      "\n"
      "[mode]\n"
      "subcritical_mode = quoted\n"
      "seed = 99\n"
      "threads = 2\n";
  const RunConfig c = parse_config(text);
  CHECK(c.c_phi == 0.5);
  CHECK(c.gamma == 0.25);
  REQUIRE(c.b_table.size() == 3);
  CHECK(c.b_table[1].first == 0.5);
  CHECK(c.b_table[1].second == 1.25);
  CHECK(c.N == 12);
  CHECK(c.V == 4.5);
  CHECK(c.initial.family == "bose");
  CHECK(c.initial.beta == 2.0);
  CHECK(c.initial.mu == -0.8);
  REQUIRE(c.initial.center.d == 3);
  CHECK(c.initial.center[0] == 0.25);
  CHECK(c.initial.center[1] == -0.5);
  CHECK(c.n == 2);
  CHECK(c.segments == 3);
  CHECK(c.practical_dt == 0.001);
  CHECK(c.blowup_ceiling == 1.5);
  CHECK(c.s == 3.5);
  CHECK(c.gamma_stride == 2);
  CHECK(c.out_dir == "runs/alpha");
  CHECK(c.snapshot_cadence == 5);
  CHECK(c.csv_digits == 17);
  CHECK(c.subcritical_mode == SubcriticalMode::kQuoted);
  CHECK(c.seed == 99);
  CHECK(c.threads == 2);

  // Derived objects reflect the card.
  const KernelParams kp = c.kernel_params();
  CHECK(kp.gamma == 0.25);
  CHECK(kp.b(1.0) == 2.0);
  const VelocityGrid g = c.make_grid();
  CHECK(g.N == 12);
  CHECK(g.V == 4.5);
  const HyperplaneSampleSpec hs = c.hyperplane_spec();
  CHECK(hs.directions == 16);
  CHECK(hs.offsets == 9);
}

TEST_CASE("effective config echo round-trips field-for-field") {
  RunConfig c = parse_config("");
  c.c_phi = 1.0 / 3.0;
  c.gamma = 0.7;
  c.b_table = {{0.0, 1.0}, {0.3, 1.0 + 1e-13}, {1.0, 2.0 / 7.0}};
  c.N = 10;
  c.V = 5.25;
  c.initial.family = "power_tail";
  c.initial.amplitude = 0.1;
  c.initial.s = 4.5;
  c.initial.radius = 3.7;
  c.initial.center = vec3(0.1, -0.2, 1e-9);
  c.n = 3;
  c.segments = 2;
  c.practical_dt = 1e-4;
  c.blowup_ceiling = 1.02;
  c.s = 3.25;
  c.r0_override = 0.375;
  c.hyperplane_directions = 7;
  c.hyperplane_offsets = 5;
  c.gamma_stride = 4;
  c.out_dir = "scratch";
  c.snapshot_cadence = 2;
  c.csv_digits = 12;
  c.subcritical_mode = SubcriticalMode::kQuoted;
  c.seed = 123456789012345ULL;
  c.threads = 3;

  const std::string echo = effective_config(c);
  const RunConfig back = parse_config(echo);
  CHECK(same_config(back, c));
  // The echo is a fixed point: echoing the parsed echo changes nothing.
  CHECK(effective_config(back) == echo);
}

TEST_CASE("config errors carry the offending line") {
  const auto line_of = [](const std::string& text) {
    try {
      (void)parse_config(text);
    } catch (const ConfigError& e) {
      return e.line;
    }
    return -1;
  };
  CHECK(line_of("[thermo]\n") == 1);
  CHECK(line_of("[kernel]\nc_phi = 1\nwidth = 2\n") == 3);
  CHECK(line_of("c_phi = 1\n") == 1);          // entry before any section
  CHECK(line_of("[grid]\nN = twelve\n") == 2);
  CHECK(line_of("[kernel]\ngamma = 1.5\n") == 2);
  CHECK(line_of("[grid]\nd = 5\n") == 2);
  CHECK(line_of("[kernel]\nb_table = 0.5 1.0\n") == 2);  // pairs need a colon
  CHECK(line_of("[mode]\nsubcritical_mode = maybe\n") == 2);
  CHECK(line_of("[scheme]\nblowup_ceiling = 0.9\n") == 2);
  // Cross-field contract violations are not tied to one line.
  CHECK(line_of("[initial]\ncenter = 1 2\n") == 0);
  CHECK(line_of("[grid]\nd = 4\n[diagnostics]\ns = 2.5\n") == 0);
}

TEST_CASE("missing config file reports the path") {
  CHECK_THROWS_AS((void)load_config("/nonexistent/run.ini"), ConfigError);
}

TEST_CASE("snapshot round-trip is bit-exact") {
  const VelocityGrid g = VelocityGrid::make(3, 8, 4.0);
  InitialSpec spec;
  spec.amplitude = 0.7;
  spec.sigma = 1.1;
  spec.center = vec3(0.3, 0.0, -0.4);
  const Distribution f = build_initial(g, spec);

  std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
  write_snapshot(buf, f, 0.5, 2.0);
  const Snapshot snap = read_snapshot(buf);

  CHECK(snap.gamma == 0.5);
  CHECK(snap.c_phi == 2.0);
  CHECK(snap.f.grid.d == 3);
  CHECK(snap.f.grid.N == 8);
  CHECK(snap.f.grid.V == 4.0);
  REQUIRE(snap.f.values.size() == f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    CHECK(snap.f.values[i] == f.values[i]);  // exact, not approximate
  }
}

TEST_CASE("snapshot meta reads the header alone") {
  const VelocityGrid g = VelocityGrid::make(3, 4, 2.0);
  Distribution f{g, std::vector<double>(g.size(), 0.25)};
  std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
  write_snapshot(buf, f, 1.0, 3.0);
  const SnapshotMeta m = read_snapshot_meta(buf);
  CHECK(m.d == 3);
  CHECK(m.N == 4);
  CHECK(m.V == 2.0);
  CHECK(m.gamma == 1.0);
  CHECK(m.c_phi == 3.0);
}

TEST_CASE("corrupt snapshots are rejected, not misread") {
  const VelocityGrid g = VelocityGrid::make(3, 4, 2.0);
  Distribution f{g, std::vector<double>(g.size(), 0.1)};
  std::ostringstream out(std::ios::binary);
  write_snapshot(out, f, 1.0, 1.0);
  const std::string bytes = out.str();

  const auto read_bytes = [](std::string s) {
    std::istringstream in(std::move(s), std::ios::binary);
    return read_snapshot(in);
  };

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_WITH_AS((void)read_bytes(bad_magic), "bad snapshot magic",
                       SnapshotError);

  CHECK_THROWS_AS((void)read_bytes(bytes.substr(0, bytes.size() - 4)), SnapshotError);
  CHECK_THROWS_AS((void)read_bytes(bytes.substr(0, 20)), SnapshotError);
  CHECK_THROWS_AS((void)read_bytes(bytes + '\0'), SnapshotError);  // trailing byte

  std::string zero_d = bytes;
  zero_d[5] = zero_d[6] = zero_d[7] = zero_d[8] = '\0';
  CHECK_THROWS_AS((void)read_bytes(zero_d), SnapshotError);

  CHECK_THROWS_AS((void)read_snapshot("/nonexistent/state.bnk"), SnapshotError);
}

TEST_CASE("csv header lists the fixed column contract") {
  CHECK(csv_header() ==
        "t,M0,M1x,M1y,M1z,M2,M2pg,entropy,linf,gamma_conc,"
        "drift_mass_weak,drift_energy_weak,drift_mass_strong,drift_energy_strong");
}

TEST_CASE("csv output is deterministic and shaped as documented") {
  const TimeSeries s = small_series();
  std::ostringstream a, b;
  write_timeseries_csv(a, s);
  write_timeseries_csv(b, s, 15);
  CHECK(a.str() == b.str());  // byte-identical reruns

  std::istringstream lines(a.str());
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (rows == 0) {
      CHECK(line == csv_header());
    } else {
      CHECK(std::count(line.begin(), line.end(), ',') == 13);  // 14 columns
    }
    ++rows;
  }
  CHECK(rows == 4);  // header + one row per time
}

TEST_CASE("csv writer rejects bad digit counts and ragged series") {
  const TimeSeries s = small_series();
  std::ostringstream sink;
  CHECK_THROWS_AS(write_timeseries_csv(sink, s, 5), std::invalid_argument);
  CHECK_THROWS_AS(write_timeseries_csv(sink, s, 18), std::invalid_argument);
  TimeSeries ragged = s;
  ragged.drifts.pop_back();
  CHECK_THROWS_AS(write_timeseries_csv(sink, ragged), std::invalid_argument);
}
