#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hmix::sim {

/// Channel rates with weighted selection.
///
/// Small tables (up to kLinearLimit channels) select by a linear scan; larger
/// ones keep a Fenwick tree of partial sums. The running total is updated
/// incrementally; `refresh()` rebuilds it (and the tree) from the rates.
class RateTable {
 public:
  static constexpr std::size_t kLinearLimit = 130;  // 2N + 2 channels for N <= 64

  enum class Strategy { Auto, Linear, Fenwick };

  explicit RateTable(std::size_t channels, Strategy strategy = Strategy::Auto)
      : rates_(channels, 0.0),
        fenwick_(strategy == Strategy::Fenwick ||
                 (strategy == Strategy::Auto && channels > kLinearLimit)) {
    if (fenwick_) tree_.assign(channels + 1, 0.0);
  }

  std::size_t size() const noexcept { return rates_.size(); }
  double rate(std::size_t channel) const noexcept { return rates_[channel]; }
  double total() const noexcept { return total_; }
  bool uses_fenwick() const noexcept { return fenwick_; }

  void set(std::size_t channel, double rate) noexcept {
    const double delta = rate - rates_[channel];
    if (delta == 0.0) return;
    rates_[channel] = rate;
    total_ += delta;
    if (fenwick_)
      for (std::size_t i = channel + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }

  /// Sum of all rates from scratch.
  double recomputed_total() const noexcept {
    double sum = 0.0;
    for (double r : rates_) sum += r;
    return sum;
  }

  void refresh() noexcept {
    total_ = recomputed_total();
    if (!fenwick_) return;
    std::fill(tree_.begin(), tree_.end(), 0.0);
    for (std::size_t i = 1; i < tree_.size(); ++i) {
      tree_[i] += rates_[i - 1];
      const std::size_t parent = i + (i & (~i + 1));
      if (parent < tree_.size()) tree_[parent] += tree_[i];
    }
  }

  /// Channel c with cumulative rate sum_{j<c} r_j <= target < sum_{j<=c} r_j,
  /// for target in [0, total). Never returns a zero-rate channel.
  std::size_t select(double target) const {
    if (fenwick_) {
      std::size_t pos = 0;
      std::size_t step = 1;
      while (step * 2 < tree_.size()) step *= 2;
      for (; step > 0; step /= 2) {
        const std::size_t next = pos + step;
        if (next < tree_.size() && tree_[next] <= target) {
          pos = next;
          target -= tree_[next];
        }
      }
      if (pos < rates_.size() && rates_[pos] > 0.0) return pos;
      return last_positive(pos);
    }
    double cumulative = 0.0;
    for (std::size_t c = 0; c < rates_.size(); ++c) {
      cumulative += rates_[c];
      if (target < cumulative && rates_[c] > 0.0) return c;
    }
    return last_positive(rates_.size());
  }

 private:
  // rounding can push the target past the last partial sum
  std::size_t last_positive(std::size_t from) const {
    for (std::size_t c = std::min(from, rates_.size()); c-- > 0;)
      if (rates_[c] > 0.0) return c;
    for (std::size_t c = from; c < rates_.size(); ++c)
      if (rates_[c] > 0.0) return c;
    throw std::logic_error("RateTable::select: all rates are zero");
  }

  std::vector<double> rates_;
  std::vector<double> tree_;
  double total_ = 0.0;
  bool fenwick_;
};

}  // namespace hmix::sim
