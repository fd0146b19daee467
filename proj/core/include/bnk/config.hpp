#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bnk/criteria.hpp"
#include "bnk/initial.hpp"
#include "bnk/kernel.hpp"

namespace bnk {

// Parse or contract failure, carrying the 1-based line of the offending entry
// (0 when the failure is not tied to a single line).
struct ConfigError : std::runtime_error {
  ConfigError(int line_, const std::string& msg);
  int line = 0;
};

// Everything a run needs, INI-addressable. Field defaults are the documented
// defaults; effective_config() echoes the complete state so that the echo alone
// reproduces the run.
struct RunConfig {
  // [kernel]
  double c_phi = 1.0;
  double gamma = 1.0;
  double b_value = 1.0;
  std::vector<std::pair<double, double>> b_table;  // non-empty overrides b_value

  // [grid]
  int d = 3;
  int N = 16;
  double V = 6.0;

  // [initial]
  InitialSpec initial;

  // [scheme]
  int n = 4;
  int segments = 1;
  double practical_dt = 0.0;     // 0: use the constructive step Delta_n
  double blowup_ceiling = 100.0; // halt when linf exceeds ceiling * linf(f0)

  // [diagnostics]
  double s = 4.0;                // weighted-norm order
  double r0_override = 0.0;      // 0: use the constructed R0
  int hyperplane_directions = 16;
  int hyperplane_offsets = 9;
  int gamma_stride = 1;

  // [io]
  std::string out_dir = "out";
  int snapshot_cadence = 0;      // write every k-th state; 0 = final state only
  int csv_digits = 15;

  // [mode]
  SubcriticalMode subcritical_mode = SubcriticalMode::kSelfConsistent;
  std::uint64_t seed = 17;
  int threads = 1;

  KernelParams kernel_params() const;
  VelocityGrid make_grid() const;
  HyperplaneSampleSpec hyperplane_spec() const;
  void validate() const;  // throws ConfigError on contract violations
};

// INI text: [section] headers, key = value entries, '#'/';' comments. Unknown
// sections or keys, malformed values, and contract violations all throw
// ConfigError with the line number. Empty text yields the defaults.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Complete canonical echo; parse_config(effective_config(c)) == c field-for-field
// (17 significant digits, enough to round-trip every double exactly).
std::string effective_config(const RunConfig& c);

}  // namespace bnk
