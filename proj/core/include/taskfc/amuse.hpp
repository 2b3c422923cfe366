#pragma once

#include <array>

#include "taskfc/hrf.hpp"
#include "taskfc/signal.hpp"

namespace taskfc {

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Result of second-order blind source separation on a 2-channel signal.
/// `mixing * sources` reconstructs the demeaned input channels; sources are
/// unit-variance with the sign fixed so each source's maximum-magnitude
/// sample is positive, ordered by descending eigenvalue of the symmetrized
/// whitened lag covariance.
struct AmuseDecomposition {
  Matrix2 mixing;
  std::array<SampledSignal, 2> sources;
  int task_source_index;  // 1-based; 0 until a selection has been made
  double eigenvalue_gap;
  bool non_identifiable;  // eigenvalue gap below tolerance; flagged, not fatal
};

/// Entry (i,j) = (1/(T+1)) * sum_tau x_i(tau) x_j(tau + lag), circular,
/// with both channels demeaned first.
Matrix2 lagged_covariance(const SampledSignal& x1, const SampledSignal& x2,
                          long lag_samples);

/// AMUSE: whiten with the lag-0 covariance, eigendecompose the symmetrized
/// whitened lag-t* covariance, rotate. Throws DegenerateInputError when the
/// lag-0 covariance is singular.
AmuseDecomposition amuse_decompose(const SampledSignal& x1,
                                   const SampledSignal& x2, long lag_samples);

/// 1-based index of the source with the largest |Pearson correlation| with
/// the regressor; ties resolve to the lower index.
int select_task_source(const AmuseDecomposition& decomposition,
                       const SampledSignal& regressor);

/// Split of one BOLD channel into its task-locked component (in the shifted
/// frame) and everything else (in native time).
struct ReferenceExtraction {
  SampledSignal task_component;
  SampledSignal reference;
  int task_source_index;
  bool non_identifiable;
};

/// Runs AMUSE on the channel pair
///   ( bold(t - shift), (stimulus * h)(t - latency - shift) - C )
/// where C is the regressor's full-period mean, selects the task source by
/// correlation with the centered regressor, and subtracts the unshifted task
/// component from the BOLD trace. Every statistic involved is a full-period
/// circular average, so the output does not depend on shift_samples.
ReferenceExtraction extract_reference(const SampledSignal& bold,
                                      const SampledSignal& stimulus,
                                      const HrfSpec& hrf, long shift_samples,
                                      long lag_samples = 1);

}  // namespace taskfc
