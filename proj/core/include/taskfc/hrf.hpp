#pragma once

#include "taskfc/signal.hpp"

namespace taskfc {

/// Double-gamma hemodynamic response, the difference of two gamma densities:
///   h(t) = b1^a1 t^(a1-1) e^(-b1 t) / Gamma(a1)
///          - c * b2^a2 t^(a2-1) e^(-b2 t) / Gamma(a2).
/// Defaults follow the canonical parameterization (a1=6, a2=12, b1=b2=0.9,
/// c=0.35). `latency` is the response onset delay and must be an integer
/// multiple of the grid step.
struct HrfSpec {
  double a1 = 6.0;
  double a2 = 12.0;
  double b1 = 0.9;
  double b2 = 0.9;
  double c = 0.35;
  double latency = 0.0;

  static HrfSpec canonical() { return {}; }

  void validate() const;
  int latency_samples(const TimeGrid& grid) const;
};

/// The double-gamma expression at a single instant t >= 0.
double double_gamma(const HrfSpec& spec, double t);

/// h sampled on the grid (latency not applied).
SampledSignal canonical_hrf(const HrfSpec& spec, const TimeGrid& grid);

/// (stimulus * h)(t - latency) under the normalized circular convolution.
SampledSignal task_regressor(const SampledSignal& stimulus, const HrfSpec& spec);

}  // namespace taskfc
