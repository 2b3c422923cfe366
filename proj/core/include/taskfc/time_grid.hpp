#pragma once

#include <stdexcept>

namespace taskfc {

/// Uniform circular sampling lattice: instants tau * delta for tau = 0..T.
/// All index arithmetic wraps modulo T+1, so every signal on the grid is
/// implicitly periodic with period (T+1) * delta.
class TimeGrid {
 public:
  TimeGrid(double delta_seconds, int num_points)
      : delta_(delta_seconds), num_points_(num_points) {
    if (!(delta_seconds > 0.0))
      throw std::invalid_argument("TimeGrid: delta must be positive");
    if (num_points < 2)
      throw std::invalid_argument("TimeGrid: need at least two sample points");
  }

  double delta() const { return delta_; }
  int num_points() const { return num_points_; }
  int max_index() const { return num_points_ - 1; }

  /// Length of one full circular period, (T+1) * delta.
  double span() const { return delta_ * num_points_; }

  /// Circular index map: any integer index to its residue in 0..T.
  int wrap(long tau) const {
    long m = tau % num_points_;
    return static_cast<int>(m < 0 ? m + num_points_ : m);
  }

  double time_at(int tau) const { return tau * delta_; }
  double fundamental_frequency() const { return 1.0 / span(); }
  double nyquist_frequency() const { return 0.5 / delta_; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double delta_;
  int num_points_;
};

}  // namespace taskfc
