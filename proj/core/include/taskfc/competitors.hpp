#pragma once

#include <string>
#include <vector>

#include "taskfc/fourier.hpp"
#include "taskfc/hrf.hpp"
#include "taskfc/panel.hpp"

namespace taskfc {

enum class FcMethod { naive_pearson, task_pearson, beta_series, coherence };

std::string to_string(FcMethod method);

/// Per-subject connectivity values in [0,1] plus their mean and median.
/// Subjects that cannot produce a value (constant series, dropped spectra)
/// hold NaN, are excluded from the aggregates, and are counted.
struct MethodEstimate {
  FcMethod method;
  std::vector<double> per_subject;
  double mean_aggregate;
  double median_aggregate;
  int excluded_subjects;
};

/// |Pearson correlation| of the two node series over all time points.
MethodEstimate naive_pearson(const BoldPanel& panel, const std::string& node_k,
                             const std::string& node_l);

/// |Pearson correlation| restricted to instants where the stimulus is active.
/// Requires at least three active samples.
MethodEstimate task_pearson(const BoldPanel& panel, const std::string& node_k,
                            const std::string& node_l,
                            const SampledSignal& stimulus);

/// Block-wise regression: one regressor per maximal active stimulus block
/// (that block's boxcar convolved with the node HRF) plus an intercept,
/// fitted to the demeaned series; the per-subject value is the |Pearson
/// correlation| of the two fitted coefficient sequences. With only two
/// blocks any fit is degenerate and the value is identically 1.
MethodEstimate beta_series(const BoldPanel& panel, const std::string& node_k,
                           const std::string& node_l,
                           const SampledSignal& stimulus, const HrfSpec& hrf_k,
                           const HrfSpec& hrf_l);

/// Welch cross-spectrum parameters. A zero segment_length selects
/// min(64, (T+1)/2); segments overlap by half and are Hann-windowed and
/// demeaned. At least two segments are required: a single-segment estimate
/// has coherence identically one.
struct WelchParams {
  int segment_length = 0;
};

/// Magnitude coherence |S_kl| / sqrt(S_kk S_ll) from Welch-averaged
/// cross-spectra; the per-subject value is the median over band bins.
/// When `mean_curve` is given it receives the across-subject mean
/// coherence per band bin.
MethodEstimate coherence_fc(const BoldPanel& panel, const std::string& node_k,
                            const std::string& node_l,
                            const FrequencyBand& band,
                            const WelchParams& params = {},
                            std::vector<CurvePoint>* mean_curve = nullptr);

}  // namespace taskfc
