#pragma once

#include <cmath>

namespace bnk {

// Neumaier's compensated summation. Moments and conservation ledgers are sums of
// up to ~1e9 mixed-sign terms; naive accumulation loses ~sqrt(n) ulps, which would
// eat the 1e-12 relative budget on the moment contracts. The compensated form keeps
// the error at a few ulps of the running sum regardless of length, and — because the
// order of accumulation is fixed by the caller — results are machine-reproducible.
class Kahan {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  // Merge another accumulator (used by the deterministic slab reduction: slabs are
  // combined in index order, never concurrently).
  void add(const Kahan& other) {
    add(other.sum_);
    comp_ += other.comp_;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace bnk
