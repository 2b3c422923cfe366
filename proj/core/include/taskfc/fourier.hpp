#pragma once

#include <complex>
#include <vector>

#include "taskfc/signal.hpp"

namespace taskfc {

/// Open frequency interval (lower, upper) in Hz. HRFs pass mostly the low
/// band, so estimators restrict spectral statistics to such an interval;
/// the default is (0, 0.15) Hz.
struct FrequencyBand {
  double lower = 0.0;
  double upper = 0.15;
};

inline FrequencyBand default_band() { return {}; }

/// One point of a frequency-indexed curve.
struct CurvePoint {
  double frequency;
  double value;  // NaN marks a dropped frequency
};

/// Checks 0 <= lower < upper <= Nyquist for the given grid.
void validate_band(const FrequencyBand& band, const TimeGrid& grid);

/// Normalized discrete-time Fourier transform evaluated at an arbitrary
/// frequency: (1/(T+1)) * sum_tau f(tau) exp(-2 pi i xi tau delta).
/// Periodic in xi with period 1/delta.
std::complex<double> dft(const SampledSignal& f, double xi_hz);

/// Multiples of the fundamental frequency j / ((T+1) delta) strictly inside
/// the band, ascending. Throws EmptyBandError when none fall inside.
std::vector<double> fourier_grid(const TimeGrid& grid, const FrequencyBand& band);

}  // namespace taskfc
