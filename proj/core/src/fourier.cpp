#include "taskfc/fourier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "taskfc/errors.hpp"

namespace taskfc {

void validate_band(const FrequencyBand& band, const TimeGrid& grid) {
  if (!(band.lower >= 0.0) || !(band.lower < band.upper))
    throw std::invalid_argument("FrequencyBand: need 0 <= lower < upper");
  if (!(band.upper <= grid.nyquist_frequency()))
    throw std::invalid_argument("FrequencyBand: upper bound exceeds Nyquist");
}

std::complex<double> dft(const SampledSignal& f, double xi_hz) {
  if (!std::isfinite(xi_hz))
    throw std::invalid_argument("dft: frequency must be finite");
  const int n = f.size();
  const double omega = -2.0 * std::numbers::pi * xi_hz * f.grid().delta();
  double re = 0.0, im = 0.0;
  for (int tau = 0; tau < n; ++tau) {
    const double phase = omega * tau;
    re += f[tau] * std::cos(phase);
    im += f[tau] * std::sin(phase);
  }
  return {re / n, im / n};
}

std::vector<double> fourier_grid(const TimeGrid& grid, const FrequencyBand& band) {
  validate_band(band, grid);
  const double fundamental = grid.fundamental_frequency();
  std::vector<double> frequencies;
  for (int j = 1;; ++j) {
    const double xi = j * fundamental;
    if (xi >= band.upper) break;
    if (xi > band.lower) frequencies.push_back(xi);
  }
  if (frequencies.empty())
    throw EmptyBandError("fourier_grid: no grid frequency inside the band");
  return frequencies;
}

}  // namespace taskfc
