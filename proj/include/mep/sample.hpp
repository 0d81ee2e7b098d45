#ifndef MEP_SAMPLE_HPP
#define MEP_SAMPLE_HPP

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mep/error.hpp"

namespace mep {

/// Order statistics X_(1) >= X_(2) >= ... >= X_(n) of a sample.
///
/// Indexing through `order_stat` is 1-based to match the usual notation;
/// `values()` exposes the underlying descending array.
class SortedSample {
public:
  SortedSample() = default;

  /// Sorts `raw` into descending order.
  static SortedSample from_unsorted(std::vector<double> raw) {
    std::sort(raw.begin(), raw.end(), std::greater<>());
    return SortedSample(std::move(raw));
  }

  /// Adopts data that is already weakly decreasing.
  static SortedSample from_descending(std::vector<double> sorted) {
    if (!std::is_sorted(sorted.begin(), sorted.end(), std::greater<>()))
      throw SampleError("values are not in descending order");
    return SortedSample(std::move(sorted));
  }

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  /// X_(i), 1 <= i <= n.
  double order_stat(std::size_t i) const {
    if (i < 1 || i > values_.size())
      throw DomainError("order statistic index " + std::to_string(i) + " outside 1.." +
                        std::to_string(values_.size()));
    return values_[i - 1];
  }

  double max() const { return order_stat(1); }

  std::span<const double> values() const noexcept { return values_; }

  /// Number of values strictly greater than u.
  std::size_t count_above(double u) const noexcept {
    const auto it = std::partition_point(values_.begin(), values_.end(),
                                         [u](double v) { return v > u; });
    return static_cast<std::size_t>(it - values_.begin());
  }

  /// Returns a copy with every value mapped through `scale * x + shift`.
  SortedSample affine(double scale, double shift) const {
    if (!(scale > 0.0)) throw DomainError("affine map needs a positive scale");
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(),
                   [=](double x) { return scale * x + shift; });
    return SortedSample(std::move(out));
  }

private:
  explicit SortedSample(std::vector<double> v) : values_(std::move(v)) {}

  std::vector<double> values_;
};

}  // namespace mep

#endif  // MEP_SAMPLE_HPP
