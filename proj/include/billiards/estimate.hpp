#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace billiards {

/// Mergeable Monte Carlo statistic.
///
/// Values are accumulated as fixed-point integers (2^-40 resolution), so
/// merging is exactly associative and commutative: any partition of a sample
/// set over any number of workers yields bit-identical mean and stderr.
class Estimate {
 public:
  static constexpr double kScale = 0x1.0p40;
  static constexpr double kMaxAbs = 0x1.0p20;

  void add(double x) {
    if (!(std::fabs(x) <= kMaxAbs)) throw std::domain_error("Estimate: observation out of fixed-point range");
    const auto q = static_cast<__int128>(std::llround(x * kScale));
    sum_ += q;
    // x^2 in the same scale: q^2 / kScale, rounded.
    const __int128 q2 = q * q;
    sum_sq_ += (q2 + (static_cast<__int128>(1) << 39)) >> 40;
    ++count_;
  }

  void merge(const Estimate& o) {
    sum_ += o.sum_;
    sum_sq_ += o.sum_sq_;
    count_ += o.count_;
  }

  static Estimate merged(Estimate a, const Estimate& b) {
    a.merge(b);
    return a;
  }

  std::uint64_t count() const { return count_; }

  double mean() const {
    if (count_ == 0) return 0.0;
    return static_cast<double>(static_cast<long double>(sum_) / kScale / static_cast<long double>(count_));
  }

  /// Unbiased sample variance.
  double variance() const {
    if (count_ < 2) return 0.0;
    const long double n = static_cast<long double>(count_);
    const long double s = static_cast<long double>(sum_) / kScale;
    const long double s2 = static_cast<long double>(sum_sq_) / kScale;
    const long double v = (s2 - s * s / n) / (n - 1.0L);
    return v > 0.0L ? static_cast<double>(v) : 0.0;
  }

  /// Standard error of the mean.
  double std_error() const {
    if (count_ < 2) return 0.0;
    return std::sqrt(variance() / static_cast<double>(count_));
  }

  friend bool operator==(const Estimate&, const Estimate&) = default;

 private:
  __int128 sum_ = 0;
  __int128 sum_sq_ = 0;
  std::uint64_t count_ = 0;
};

}  // namespace billiards
