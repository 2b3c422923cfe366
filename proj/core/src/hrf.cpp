#include "taskfc/hrf.hpp"

#include <cmath>
#include <stdexcept>

namespace taskfc {

void HrfSpec::validate() const {
  if (!(a1 > 0.0 && a2 > 0.0 && b1 > 0.0 && b2 > 0.0))
    throw std::invalid_argument("HrfSpec: shape and rate parameters must be positive");
  if (!(c >= 0.0 && c <= 1.0))
    throw std::invalid_argument("HrfSpec: undershoot weight must lie in [0,1]");
  if (!std::isfinite(latency))
    throw std::invalid_argument("HrfSpec: latency must be finite");
}

int HrfSpec::latency_samples(const TimeGrid& grid) const {
  const double ratio = latency / grid.delta();
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9)
    throw std::invalid_argument("HrfSpec: latency must be an integer multiple of delta");
  return static_cast<int>(rounded);
}

double double_gamma(const HrfSpec& spec, double t) {
  if (t < 0.0) return 0.0;
  auto gamma_density = [t](double a, double b) {
    if (t == 0.0) return a > 1.0 ? 0.0 : (a == 1.0 ? b : INFINITY);
    return std::exp(a * std::log(b) + (a - 1.0) * std::log(t) - b * t -
                    std::lgamma(a));
  };
  return gamma_density(spec.a1, spec.b1) - spec.c * gamma_density(spec.a2, spec.b2);
}

SampledSignal canonical_hrf(const HrfSpec& spec, const TimeGrid& grid) {
  spec.validate();
  std::vector<double> values(grid.num_points());
  for (int tau = 0; tau < grid.num_points(); ++tau)
    values[tau] = double_gamma(spec, grid.time_at(tau));
  return SampledSignal(grid, std::move(values));
}

SampledSignal task_regressor(const SampledSignal& stimulus, const HrfSpec& spec) {
  const SampledSignal h = canonical_hrf(spec, stimulus.grid());
  SampledSignal convolved = circular_convolve(stimulus, h);
  const int lag = spec.latency_samples(stimulus.grid());
  return lag == 0 ? convolved : circular_shift(convolved, lag);
}

}  // namespace taskfc
