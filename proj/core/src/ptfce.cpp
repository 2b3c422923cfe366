#include "taskfc/ptfce.hpp"

#include <cmath>
#include <stdexcept>

#include "stats_util.hpp"
#include "taskfc/amuse.hpp"
#include "taskfc/errors.hpp"
#include "taskfc/rng.hpp"

namespace taskfc {

namespace {

// (1/(T+1)) sum_t a(t - shift) b(t + s - shift) for every s, written into
// acc. The full-period circular sum makes the shift cancel algebraically,
// but the indices are applied as stated so the implementation matches its
// definition for any inputs.
void accumulate_cross_lags(std::span<const double> a, std::span<const double> b,
                           int shift, double sign, std::vector<double>& acc) {
  const int n = static_cast<int>(a.size());
  const double w = sign / n;
  for (int s = 0; s < n; ++s) {
    double sum = 0.0;
    int i = ((0 - shift) % n + n) % n;
    int j = (i + s) % n;
    for (int t = 0; t < n; ++t) {
      sum += a[i] * b[j];
      if (++i == n) i = 0;
      if (++j == n) j = 0;
    }
    acc[s] += w * sum;
  }
}

struct PairComponents {
  AutocovDifference akl;
  AutocovDifference akk;
  AutocovDifference all;
};

PtfcEstimate estimate_from_components(const PairComponents& parts,
                                      const FrequencyBand& band,
                                      const std::string& node_k,
                                      const std::string& node_l,
                                      std::uint64_t seed,
                                      int non_identifiable_subjects) {
  const auto frequencies = fourier_grid(parts.akl.grid, band);
  auto curve = spectral_ratio(parts.akl, parts.akk, parts.all, frequencies);

  std::vector<double> kept;
  int dropped = 0;
  for (const CurvePoint& p : curve) {
    if (std::isfinite(p.value))
      kept.push_back(p.value);
    else
      ++dropped;
  }
  if (kept.empty())
    throw EstimationFailedError("ptfce: every band frequency was dropped");

  return PtfcEstimate{std::move(curve),
                      detail::lower_median(std::move(kept)),
                      band,
                      dropped,
                      {node_k, node_l},
                      seed,
                      non_identifiable_subjects};
}

}  // namespace

ShiftAssignment draw_shifts(int n, const TimeGrid& grid, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("draw_shifts: need at least one draw");
  std::vector<int> shifts(n);
  for (int subject = 0; subject < n; ++subject) {
    CounterRng rng(seed, stream::kShifts, static_cast<std::uint32_t>(subject));
    shifts[subject] = static_cast<int>(
        rng.next_below(static_cast<std::uint32_t>(grid.num_points())));
  }
  return ShiftAssignment{std::move(shifts), seed};
}

AutocovDifference autocov_difference(std::span<const SampledSignal> yk,
                                     std::span<const SampledSignal> yl,
                                     std::span<const SampledSignal> rk,
                                     std::span<const SampledSignal> rl,
                                     const ShiftAssignment& shifts) {
  const std::size_t n = yk.size();
  if (n == 0 || yl.size() != n || rk.size() != n || rl.size() != n ||
      shifts.shifts.size() != n)
    throw std::invalid_argument("autocov_difference: subject counts differ");
  const TimeGrid grid = yk[0].grid();
  for (std::size_t w = 0; w < n; ++w)
    if (!(yk[w].grid() == grid) || !(yl[w].grid() == grid) ||
        !(rk[w].grid() == grid) || !(rl[w].grid() == grid))
      throw std::invalid_argument("autocov_difference: grid mismatch");

  std::vector<double> acc(grid.num_points(), 0.0);
  for (std::size_t w = 0; w < n; ++w) {
    const int shift = grid.wrap(shifts.shifts[w]);
    accumulate_cross_lags(yk[w].values(), yl[w].values(), shift, 1.0, acc);
    accumulate_cross_lags(rk[w].values(), rl[w].values(), shift, -1.0, acc);
  }
  for (double& v : acc) v /= static_cast<double>(n);
  return AutocovDifference{grid, std::move(acc)};
}

std::vector<CurvePoint> spectral_ratio(const AutocovDifference& akl,
                                       const AutocovDifference& akk,
                                       const AutocovDifference& all,
                                       std::span<const double> frequencies) {
  if (!(akl.grid == akk.grid) || !(akl.grid == all.grid))
    throw std::invalid_argument("spectral_ratio: grid mismatch");
  const SampledSignal skl(akl.grid, akl.values);
  const SampledSignal skk(akk.grid, akk.values);
  const SampledSignal sll(all.grid, all.values);

  std::vector<CurvePoint> curve;
  curve.reserve(frequencies.size());
  for (double xi : frequencies) {
    const double numerator = std::abs(dft(skl, xi));
    const double denominator =
        std::sqrt(std::abs(dft(skk, xi) * dft(sll, xi)));
    if (denominator < 1e-14) {
      curve.push_back({xi, std::nan("")});
    } else {
      curve.push_back({xi, numerator / denominator});
    }
  }
  return curve;
}

PtfcEstimate ptfce_estimate(const BoldPanel& panel, const std::string& node_k,
                            const std::string& node_l,
                            const SampledSignal& stimulus, const HrfSpec& hrf_k,
                            const HrfSpec& hrf_l, const FrequencyBand& band,
                            std::uint64_t seed) {
  if (node_k == node_l)
    throw std::invalid_argument("ptfce_estimate: node labels must differ");
  const int k = panel.node_index(node_k);
  const int l = panel.node_index(node_l);
  if (!(stimulus.grid() == panel.grid()))
    throw std::invalid_argument("ptfce_estimate: stimulus grid mismatch");

  const int n = panel.num_subjects();
  const ShiftAssignment shifts = draw_shifts(n, panel.grid(), seed);

  std::vector<SampledSignal> yk, yl, rk, rl;
  yk.reserve(n); yl.reserve(n); rk.reserve(n); rl.reserve(n);
  int non_identifiable = 0;
  auto extract_node = [&](int w, int node, const HrfSpec& hrf,
                          std::vector<SampledSignal>& ys,
                          std::vector<SampledSignal>& rs) {
    SampledSignal bold = panel.signal(w, node);
    try {
      ReferenceExtraction extraction =
          extract_reference(bold, stimulus, hrf, shifts.shifts[w]);
      if (extraction.non_identifiable) ++non_identifiable;
      rs.push_back(std::move(extraction.reference));
    } catch (const DegenerateInputError& e) {
      throw DegenerateInputError(std::string(e.what()) + " (subject " +
                                 panel.subject_ids()[w] + ")");
    }
    ys.push_back(std::move(bold));
  };
  for (int w = 0; w < n; ++w) {
    extract_node(w, k, hrf_k, yk, rk);
    extract_node(w, l, hrf_l, yl, rl);
  }

  PairComponents parts{autocov_difference(yk, yl, rk, rl, shifts),
                       autocov_difference(yk, yk, rk, rk, shifts),
                       autocov_difference(yl, yl, rl, rl, shifts)};
  return estimate_from_components(parts, band, node_k, node_l, seed,
                                  non_identifiable);
}

PtfcEstimate ptfce_estimate_with_references(
    const BoldPanel& panel, const std::string& node_k,
    const std::string& node_l, std::span<const SampledSignal> refs_k,
    std::span<const SampledSignal> refs_l, const FrequencyBand& band,
    std::uint64_t seed) {
  if (node_k == node_l)
    throw std::invalid_argument("ptfce_estimate: node labels must differ");
  const int k = panel.node_index(node_k);
  const int l = panel.node_index(node_l);
  const int n = panel.num_subjects();
  if (static_cast<int>(refs_k.size()) != n ||
      static_cast<int>(refs_l.size()) != n)
    throw std::invalid_argument(
        "ptfce_estimate_with_references: one reference per subject required");

  const ShiftAssignment shifts = draw_shifts(n, panel.grid(), seed);
  std::vector<SampledSignal> yk, yl;
  yk.reserve(n); yl.reserve(n);
  for (int w = 0; w < n; ++w) {
    yk.push_back(panel.signal(w, k));
    yl.push_back(panel.signal(w, l));
  }
  std::vector<SampledSignal> rk(refs_k.begin(), refs_k.end());
  std::vector<SampledSignal> rl(refs_l.begin(), refs_l.end());

  PairComponents parts{autocov_difference(yk, yl, rk, rl, shifts),
                       autocov_difference(yk, yk, rk, rk, shifts),
                       autocov_difference(yl, yl, rl, rl, shifts)};
  return estimate_from_components(parts, band, node_k, node_l, seed, 0);
}

PtfcMatrix ptfce_matrix(const BoldPanel& panel, const SampledSignal& stimulus,
                        std::span<const HrfSpec> hrfs,
                        const FrequencyBand& band, std::uint64_t seed) {
  const int K = panel.num_nodes();
  const int n = panel.num_subjects();
  if (static_cast<int>(hrfs.size()) != K)
    throw std::invalid_argument("ptfce_matrix: one HRF per node required");

  const ShiftAssignment shifts = draw_shifts(n, panel.grid(), seed);

  // Extraction is pair-independent: do it once per (subject, node).
  std::vector<std::vector<SampledSignal>> bold(K), refs(K);
  for (int node = 0; node < K; ++node) {
    bold[node].reserve(n);
    refs[node].reserve(n);
    for (int w = 0; w < n; ++w) {
      SampledSignal y = panel.signal(w, node);
      ReferenceExtraction extraction =
          extract_reference(y, stimulus, hrfs[node], shifts.shifts[w]);
      refs[node].push_back(std::move(extraction.reference));
      bold[node].push_back(std::move(y));
    }
  }

  std::vector<AutocovDifference> autos;
  autos.reserve(K);
  for (int node = 0; node < K; ++node)
    autos.push_back(autocov_difference(bold[node], bold[node], refs[node],
                                       refs[node], shifts));

  PtfcMatrix matrix{panel.node_labels(),
                    std::vector<double>(static_cast<std::size_t>(K) * K,
                                        std::nan("")),
                    {}};
  for (int k = 0; k < K; ++k) matrix.values[k * K + k] = 1.0;
  for (int k = 0; k < K; ++k) {
    for (int l = k + 1; l < K; ++l) {
      try {
        const AutocovDifference cross =
            autocov_difference(bold[k], bold[l], refs[k], refs[l], shifts);
        PairComponents parts{cross, autos[k], autos[l]};
        const PtfcEstimate estimate = estimate_from_components(
            parts, band, panel.node_labels()[k], panel.node_labels()[l], seed, 0);
        matrix.values[k * K + l] = estimate.estimate;
        matrix.values[l * K + k] = estimate.estimate;
      } catch (const std::exception&) {
        matrix.failed_pairs.push_back(panel.node_labels()[k] + "|" +
                                      panel.node_labels()[l]);
      }
    }
  }
  return matrix;
}

}  // namespace taskfc
