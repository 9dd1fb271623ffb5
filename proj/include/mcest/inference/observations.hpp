#ifndef MCEST_INFERENCE_OBSERVATIONS_HPP
#define MCEST_INFERENCE_OBSERVATIONS_HPP

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "mcest/channel/params.hpp"
#include "mcest/errors.hpp"

namespace mcest::inference {

/// S windowed counts per receiver. Either receiver may be missing; the
/// difference g2 - g1 exists only when both are present.
class ObservationSet {
 public:
  ObservationSet() = default;

  static ObservationSet from_pairs(std::vector<std::int64_t> g1, std::vector<std::int64_t> g2) {
    if (g1.size() != g2.size()) throw validation_error("ObservationSet: g1 and g2 lengths differ");
    ObservationSet o;
    o.g_diff_.resize(g1.size());
    for (std::size_t s = 0; s < g1.size(); ++s) o.g_diff_[s] = g2[s] - g1[s];
    o.g1_ = std::move(g1);
    o.g2_ = std::move(g2);
    o.has1_ = o.has2_ = true;
    o.check();
    return o;
  }

  static ObservationSet from_single(channel::Receiver j, std::vector<std::int64_t> g) {
    ObservationSet o;
    if (j == channel::Receiver::rx1) { o.g1_ = std::move(g); o.has1_ = true; }
    else { o.g2_ = std::move(g); o.has2_ = true; }
    o.check();
    return o;
  }

  bool has(channel::Receiver j) const { return j == channel::Receiver::rx1 ? has1_ : has2_; }
  bool has_difference() const { return has1_ && has2_; }

  std::size_t size() const { return has1_ ? g1_.size() : g2_.size(); }

  const std::vector<std::int64_t>& counts(channel::Receiver j) const {
    if (!has(j)) throw validation_error("ObservationSet: receiver not observed");
    return j == channel::Receiver::rx1 ? g1_ : g2_;
  }
  const std::vector<std::int64_t>& g_diff() const {
    if (!has_difference()) throw validation_error("ObservationSet: difference needs both receivers");
    return g_diff_;
  }

  /// Copy with c added to every count of both receivers.
  ObservationSet shifted(std::int64_t c) const {
    ObservationSet o = *this;
    for (auto& g : o.g1_) g += c;
    for (auto& g : o.g2_) g += c;
    return o;
  }

 private:
  void check() const {
    if (size() == 0) throw validation_error("ObservationSet: needs at least one observation");
    for (const auto* v : {&g1_, &g2_})
      for (std::int64_t g : *v)
        if (g < 0) throw validation_error("ObservationSet: counts must be >= 0");
  }

  std::vector<std::int64_t> g1_, g2_, g_diff_;
  bool has1_ = false, has2_ = false;
};

inline double sample_mean(const std::vector<std::int64_t>& g) {
  if (g.empty()) throw validation_error("sample_mean: empty");
  // Integer sum is exact, so the mean does not depend on summation order.
  const std::int64_t total = std::accumulate(g.begin(), g.end(), std::int64_t{0});
  return static_cast<double>(total) / static_cast<double>(g.size());
}

}  // namespace mcest::inference

#endif  // MCEST_INFERENCE_OBSERVATIONS_HPP
