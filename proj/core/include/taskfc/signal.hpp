#pragma once

#include <span>
#include <vector>

#include "taskfc/time_grid.hpp"

namespace taskfc {

/// Real-valued function sampled on a TimeGrid. Values must be finite and
/// match the grid length; circular semantics come from the grid.
class SampledSignal {
 public:
  SampledSignal(TimeGrid grid, std::vector<double> values);

  const TimeGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  int size() const { return grid_.num_points(); }

  double operator[](int tau) const { return values_[tau]; }
  double at_wrapped(long tau) const { return values_[grid_.wrap(tau)]; }

 private:
  TimeGrid grid_;
  std::vector<double> values_;
};

/// Half-open interval [start, end) in seconds.
struct Interval {
  double start;
  double end;
};

/// Indicator of a union of half-open intervals sampled at the grid instants.
/// Intervals must lie inside [0, span) and must not overlap.
SampledSignal boxcar_stimulus(std::span<const Interval> intervals,
                              const TimeGrid& grid);

/// Normalized circular convolution:
///   out(tau) = (1/(T+1)) * sum_{tau'} f(tau') g(tau - tau'),  indices wrapped.
SampledSignal circular_convolve(const SampledSignal& f, const SampledSignal& g);

/// out(tau) = f(tau - lag), indices wrapped.
SampledSignal circular_shift(const SampledSignal& f, long lag_samples);

/// Full-period mean (1/(T+1)) * sum_tau f(tau).
double time_average(const SampledSignal& f);

/// f minus its full-period mean.
SampledSignal demeaned(const SampledSignal& f);

}  // namespace taskfc
