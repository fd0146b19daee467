#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "bnk/grid.hpp"

namespace bnk {

// Binary state snapshot, format BNKF1 (all multi-byte fields little-endian):
//   bytes 0-4   magic "BNKF1"
//   int32       d
//   int32       N
//   float64     V
//   float64     gamma
//   float64     c_phi
//   float64[N^d] node values, row-major (axis 0 slowest)
// gamma and c_phi ride along so a snapshot alone identifies the kernel it was
// produced under. Round-trips are bit-exact.
struct SnapshotError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SnapshotMeta {
  int d = 0;
  int N = 0;
  double V = 0.0;
  double gamma = 0.0;
  double c_phi = 0.0;
};

struct Snapshot {
  Distribution f;
  double gamma = 0.0;
  double c_phi = 0.0;
};

void write_snapshot(std::ostream& os, const Distribution& f, double gamma,
                    double c_phi);
void write_snapshot(const std::string& path, const Distribution& f, double gamma,
                    double c_phi);

Snapshot read_snapshot(std::istream& is);
Snapshot read_snapshot(const std::string& path);

// Header only (no payload validation beyond shape plausibility).
SnapshotMeta read_snapshot_meta(std::istream& is);
SnapshotMeta read_snapshot_meta(const std::string& path);

}  // namespace bnk
