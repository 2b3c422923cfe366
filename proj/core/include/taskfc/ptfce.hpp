#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "taskfc/fourier.hpp"
#include "taskfc/hrf.hpp"
#include "taskfc/panel.hpp"
#include "taskfc/signal.hpp"

namespace taskfc {

/// One uniform circular shift per subject, reproducible from the seed.
struct ShiftAssignment {
  std::vector<int> shifts;
  std::uint64_t seed;
};

/// Autocovariance difference A(s) over lags s = 0..T.
struct AutocovDifference {
  TimeGrid grid;
  std::vector<double> values;
};

/// Spectral-ratio curve over the band grid plus its median, the
/// population-level task-evoked connectivity estimate for one node pair.
struct PtfcEstimate {
  std::vector<CurvePoint> curve;
  double estimate;
  FrequencyBand band;
  int dropped_frequencies;
  std::pair<std::string, std::string> node_pair;
  std::uint64_t seed;
  int non_identifiable_subjects;  // AMUSE eigenvalue-gap warnings
};

/// n i.i.d. uniform draws on {0..T} from streams keyed by (seed, subject).
ShiftAssignment draw_shifts(int n, const TimeGrid& grid, std::uint64_t seed);

/// A(s) = (1/(T+1)) sum_t [ (1/n) sum_w  y_k(w; t-U_w) y_l(w; t+s-U_w) ]
///        - the same expression with the reference signals, circular
/// indexing throughout, accumulated in fixed subject order.
AutocovDifference autocov_difference(std::span<const SampledSignal> yk,
                                     std::span<const SampledSignal> yl,
                                     std::span<const SampledSignal> rk,
                                     std::span<const SampledSignal> rl,
                                     const ShiftAssignment& shifts);

/// |dft(akl)| / sqrt(|dft(akk) dft(all)|) at each frequency; frequencies with
/// denominator below 1e-14 are emitted as NaN.
std::vector<CurvePoint> spectral_ratio(const AutocovDifference& akl,
                                       const AutocovDifference& akk,
                                       const AutocovDifference& all,
                                       std::span<const double> frequencies);

/// Full estimator for one node pair: draw shifts, extract per-subject
/// references (AMUSE), form the three autocovariance differences, take the
/// band median of the spectral-ratio curve (lower median for even counts).
/// Deterministic given (panel, seed).
PtfcEstimate ptfce_estimate(const BoldPanel& panel, const std::string& node_k,
                            const std::string& node_l,
                            const SampledSignal& stimulus, const HrfSpec& hrf_k,
                            const HrfSpec& hrf_l, const FrequencyBand& band,
                            std::uint64_t seed);

/// Same estimator with the reference signals supplied by the caller instead
/// of extracted. Signals must live on the panel grid, one per subject.
PtfcEstimate ptfce_estimate_with_references(
    const BoldPanel& panel, const std::string& node_k,
    const std::string& node_l, std::span<const SampledSignal> refs_k,
    std::span<const SampledSignal> refs_l, const FrequencyBand& band,
    std::uint64_t seed);

/// All-pairs symmetric matrix with unit diagonal. Reference extraction runs
/// once per node and is shared across pairs; per-pair failures are recorded
/// as NaN entries rather than aborting the whole matrix.
struct PtfcMatrix {
  std::vector<std::string> labels;
  std::vector<double> values;  // K*K row-major
  std::vector<std::string> failed_pairs;

  double at(int k, int l) const {
    return values[static_cast<std::size_t>(k) * labels.size() + l];
  }
};

PtfcMatrix ptfce_matrix(const BoldPanel& panel, const SampledSignal& stimulus,
                        std::span<const HrfSpec> hrfs,
                        const FrequencyBand& band, std::uint64_t seed);

}  // namespace taskfc
