#include "taskfc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace taskfc {

SampledSignal::SampledSignal(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.num_points())
    throw std::invalid_argument("SampledSignal: value count does not match grid");
  for (double v : values_)
    if (!std::isfinite(v))
      throw std::invalid_argument("SampledSignal: values must be finite");
}

SampledSignal boxcar_stimulus(std::span<const Interval> intervals,
                              const TimeGrid& grid) {
  std::vector<Interval> sorted(intervals.begin(), intervals.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  const double span = grid.span();
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const Interval& iv = sorted[i];
    if (!(iv.start < iv.end))
      throw std::invalid_argument("boxcar_stimulus: interval start must precede end");
    if (iv.start < 0.0 || iv.end > span)
      throw std::invalid_argument("boxcar_stimulus: interval outside [0, span)");
    if (i > 0 && sorted[i - 1].end > iv.start)
      throw std::invalid_argument("boxcar_stimulus: overlapping intervals");
  }

  // Sample instants sit exactly on interval endpoints in common designs, so
  // membership is tested with a small tolerance to keep the half-open
  // semantics stable under floating-point rounding of tau * delta.
  const double tol = 1e-9 * grid.delta();
  std::vector<double> values(grid.num_points(), 0.0);
  for (int tau = 0; tau < grid.num_points(); ++tau) {
    const double t = grid.time_at(tau);
    for (const Interval& iv : sorted) {
      if (t >= iv.start - tol && t < iv.end - tol) {
        values[tau] = 1.0;
        break;
      }
    }
  }
  return SampledSignal(grid, std::move(values));
}

SampledSignal circular_convolve(const SampledSignal& f, const SampledSignal& g) {
  if (!(f.grid() == g.grid()))
    throw std::invalid_argument("circular_convolve: signals on different grids");
  const int n = f.size();
  std::vector<double> out(n, 0.0);
  for (int tau = 0; tau < n; ++tau) {
    double acc = 0.0;
    // g((tau - tau') mod n): walk g backwards from tau with wraparound.
    int j = tau;
    for (int tp = 0; tp < n; ++tp) {
      acc += f[tp] * g[j];
      if (--j < 0) j = n - 1;
    }
    out[tau] = acc / n;
  }
  return SampledSignal(f.grid(), std::move(out));
}

SampledSignal circular_shift(const SampledSignal& f, long lag_samples) {
  const int n = f.size();
  const int lag = f.grid().wrap(lag_samples);
  std::vector<double> out(n);
  for (int tau = 0; tau < n; ++tau)
    out[tau] = f[(tau - lag + n) % n];
  return SampledSignal(f.grid(), std::move(out));
}

double time_average(const SampledSignal& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v;
  return acc / f.size();
}

SampledSignal demeaned(const SampledSignal& f) {
  const double mean = time_average(f);
  std::vector<double> out(f.values());
  for (double& v : out) v -= mean;
  return SampledSignal(f.grid(), std::move(out));
}

}  // namespace taskfc
