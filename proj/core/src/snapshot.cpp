#include "bnk/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>

namespace bnk {
namespace {

constexpr char kMagic[5] = {'B', 'N', 'K', 'F', '1'};

void put_u32(std::ostream& os, std::uint32_t x) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = (char)((x >> (8 * i)) & 0xff);
  os.write(b, 4);
}

void put_f64(std::ostream& os, double v) {
  const std::uint64_t x = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (char)((x >> (8 * i)) & 0xff);
  os.write(b, 8);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read((char*)b, 4)) throw SnapshotError("snapshot truncated in header");
  std::uint32_t x = 0;
  for (int i = 0; i < 4; ++i) x |= (std::uint32_t)b[i] << (8 * i);
  return x;
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  if (!is.read((char*)b, 8)) throw SnapshotError("snapshot truncated");
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= (std::uint64_t)b[i] << (8 * i);
  return std::bit_cast<double>(x);
}

SnapshotMeta get_header(std::istream& is) {
  char magic[5];
  if (!is.read(magic, 5)) throw SnapshotError("snapshot too short for magic");
  for (int i = 0; i < 5; ++i) {
    if (magic[i] != kMagic[i]) throw SnapshotError("bad snapshot magic");
  }
  SnapshotMeta m;
  m.d = (int)get_u32(is);
  m.N = (int)get_u32(is);
  m.V = get_f64(is);
  m.gamma = get_f64(is);
  m.c_phi = get_f64(is);
  if (m.d < 1 || m.d > kMaxDim || m.N < 1 || !(m.V > 0.0)) {
    throw SnapshotError("implausible snapshot shape (d=" + std::to_string(m.d) +
                        ", N=" + std::to_string(m.N) + ")");
  }
  return m;
}

}  // namespace

void write_snapshot(std::ostream& os, const Distribution& f, double gamma,
                    double c_phi) {
  const VelocityGrid& g = f.grid;
  if (f.values.size() != g.size()) {
    throw SnapshotError("distribution size does not match its grid");
  }
  os.write(kMagic, 5);
  put_u32(os, (std::uint32_t)g.d);
  put_u32(os, (std::uint32_t)g.N);
  put_f64(os, g.V);
  put_f64(os, gamma);
  put_f64(os, c_phi);
  for (double v : f.values) put_f64(os, v);
  if (!os) throw SnapshotError("snapshot write failed");
}

void write_snapshot(const std::string& path, const Distribution& f, double gamma,
                    double c_phi) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SnapshotError("cannot open snapshot for writing: " + path);
  write_snapshot(out, f, gamma, c_phi);
}

Snapshot read_snapshot(std::istream& is) {
  const SnapshotMeta m = get_header(is);
  Snapshot snap;
  snap.gamma = m.gamma;
  snap.c_phi = m.c_phi;
  snap.f.grid = VelocityGrid::make(m.d, m.N, m.V);
  snap.f.values.resize(snap.f.grid.size());
  for (double& v : snap.f.values) v = get_f64(is);
  // A trailing byte means the payload length disagrees with the header shape.
  if (is.peek() != std::char_traits<char>::eof()) {
    throw SnapshotError("snapshot has trailing bytes beyond N^d values");
  }
  return snap;
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open snapshot: " + path);
  return read_snapshot(in);
}

SnapshotMeta read_snapshot_meta(std::istream& is) { return get_header(is); }

SnapshotMeta read_snapshot_meta(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open snapshot: " + path);
  return get_header(in);
}

}  // namespace bnk
