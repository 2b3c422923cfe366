#include "taskfc/competitors.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "stats_util.hpp"
#include "taskfc/errors.hpp"

namespace taskfc {

namespace {

struct Aggregates {
  double mean;
  double median;
  int excluded;
};

Aggregates aggregate(const std::vector<double>& per_subject,
                     const char* what) {
  std::vector<double> kept;
  for (double v : per_subject)
    if (std::isfinite(v)) kept.push_back(v);
  if (kept.empty())
    throw EstimationFailedError(std::string(what) +
                                ": no subject produced a value");
  return Aggregates{detail::mean_of(kept), detail::lower_median(kept),
                    static_cast<int>(per_subject.size() - kept.size())};
}

MethodEstimate finish(FcMethod method, std::vector<double> per_subject,
                      const char* what) {
  const Aggregates agg = aggregate(per_subject, what);
  return MethodEstimate{method, std::move(per_subject), agg.mean, agg.median,
                        agg.excluded};
}

double abs_corr_or_nan(std::span<const double> x, std::span<const double> y) {
  const auto corr = detail::pearson(x, y);
  if (!corr) return std::nan("");
  return std::min(std::abs(*corr), 1.0);
}

// Maximal runs of active samples, treated circularly: a run touching both
// ends of the period is one block.
std::vector<std::vector<int>> stimulus_blocks(const SampledSignal& stimulus) {
  const int n = stimulus.size();
  std::vector<std::vector<int>> blocks;
  for (int t = 0; t < n; ++t) {
    if (stimulus[t] != 1.0) continue;
    if (t > 0 && stimulus[t - 1] == 1.0) {
      blocks.back().push_back(t);
    } else {
      blocks.push_back({t});
    }
  }
  if (blocks.size() > 1 && stimulus[0] == 1.0 && stimulus[n - 1] == 1.0) {
    blocks.front().insert(blocks.front().begin(), blocks.back().begin(),
                          blocks.back().end());
    blocks.pop_back();
  }
  return blocks;
}

// Cholesky solve of the (B+1)x(B+1) normal equations.
std::vector<double> solve_normal_equations(const std::vector<double>& xtx,
                                           const std::vector<double>& xty,
                                           int p) {
  std::vector<double> L(static_cast<std::size_t>(p) * p, 0.0);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = xtx[i * p + j];
      for (int m = 0; m < j; ++m) sum -= L[i * p + m] * L[j * p + m];
      if (i == j) {
        if (!(sum > 1e-12 * std::max(1.0, xtx[i * p + i]))) {
          const std::string column =
              i == 0 ? "intercept" : "block " + std::to_string(i);
          throw RankDeficientError("beta_series: design rank-deficient at " +
                                   column);
        }
        L[i * p + i] = std::sqrt(sum);
      } else {
        L[i * p + j] = sum / L[j * p + j];
      }
    }
  }
  std::vector<double> y(p), beta(p);
  for (int i = 0; i < p; ++i) {
    double sum = xty[i];
    for (int m = 0; m < i; ++m) sum -= L[i * p + m] * y[m];
    y[i] = sum / L[i * p + i];
  }
  for (int i = p - 1; i >= 0; --i) {
    double sum = y[i];
    for (int m = i + 1; m < p; ++m) sum -= L[m * p + i] * beta[m];
    beta[i] = sum / L[i * p + i];
  }
  return beta;
}

}  // namespace

std::string to_string(FcMethod method) {
  switch (method) {
    case FcMethod::naive_pearson: return "naive_pearson";
    case FcMethod::task_pearson: return "task_pearson";
    case FcMethod::beta_series: return "beta_series";
    case FcMethod::coherence: return "coherence";
  }
  return "unknown";
}

MethodEstimate naive_pearson(const BoldPanel& panel, const std::string& node_k,
                             const std::string& node_l) {
  const int k = panel.node_index(node_k);
  const int l = panel.node_index(node_l);
  std::vector<double> per_subject(panel.num_subjects());
  for (int w = 0; w < panel.num_subjects(); ++w)
    per_subject[w] = abs_corr_or_nan(panel.series(w, k), panel.series(w, l));
  return finish(FcMethod::naive_pearson, std::move(per_subject), "naive_pearson");
}

MethodEstimate task_pearson(const BoldPanel& panel, const std::string& node_k,
                            const std::string& node_l,
                            const SampledSignal& stimulus) {
  if (!(stimulus.grid() == panel.grid()))
    throw std::invalid_argument("task_pearson: stimulus grid mismatch");
  const int k = panel.node_index(node_k);
  const int l = panel.node_index(node_l);
  std::vector<int> active;
  for (int t = 0; t < stimulus.size(); ++t)
    if (stimulus[t] == 1.0) active.push_back(t);
  if (active.size() < 3)
    throw std::invalid_argument("task_pearson: need at least three active samples");

  std::vector<double> per_subject(panel.num_subjects());
  std::vector<double> xs(active.size()), ys(active.size());
  for (int w = 0; w < panel.num_subjects(); ++w) {
    const auto sk = panel.series(w, k);
    const auto sl = panel.series(w, l);
    for (std::size_t i = 0; i < active.size(); ++i) {
      xs[i] = sk[active[i]];
      ys[i] = sl[active[i]];
    }
    per_subject[w] = abs_corr_or_nan(xs, ys);
  }
  return finish(FcMethod::task_pearson, std::move(per_subject), "task_pearson");
}

MethodEstimate beta_series(const BoldPanel& panel, const std::string& node_k,
                           const std::string& node_l,
                           const SampledSignal& stimulus, const HrfSpec& hrf_k,
                           const HrfSpec& hrf_l) {
  if (!(stimulus.grid() == panel.grid()))
    throw std::invalid_argument("beta_series: stimulus grid mismatch");
  const int k = panel.node_index(node_k);
  const int l = panel.node_index(node_l);
  const auto blocks = stimulus_blocks(stimulus);
  const int B = static_cast<int>(blocks.size());
  if (B < 2)
    throw std::invalid_argument("beta_series: need at least two stimulus blocks");
  const int len = panel.grid().num_points();
  const int p = B + 1;

  // Design is shared by all subjects of a node: intercept plus one
  // block-specific regressor (block boxcar convolved with the node's HRF).
  auto build_design = [&](const HrfSpec& hrf) {
    std::vector<std::vector<double>> columns;
    columns.push_back(std::vector<double>(len, 1.0));
    for (const auto& block : blocks) {
      std::vector<double> box(len, 0.0);
      for (int t : block) box[t] = 1.0;
      columns.push_back(
          task_regressor(SampledSignal(panel.grid(), std::move(box)), hrf)
              .values());
    }
    std::vector<double> xtx(static_cast<std::size_t>(p) * p, 0.0);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) {
        double acc = 0.0;
        for (int t = 0; t < len; ++t) acc += columns[i][t] * columns[j][t];
        xtx[i * p + j] = acc;
      }
    return std::make_pair(std::move(columns), std::move(xtx));
  };
  const auto [columns_k, xtx_k] = build_design(hrf_k);
  const auto [columns_l, xtx_l] = build_design(hrf_l);

  auto fit = [&](std::span<const double> series,
                 const std::vector<std::vector<double>>& columns,
                 const std::vector<double>& xtx) {
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= len;
    std::vector<double> xty(p, 0.0);
    for (int i = 0; i < p; ++i) {
      double acc = 0.0;
      for (int t = 0; t < len; ++t) acc += columns[i][t] * (series[t] - mean);
      xty[i] = acc;
    }
    std::vector<double> beta = solve_normal_equations(xtx, xty, p);
    beta.erase(beta.begin());  // drop the intercept
    return beta;
  };

  std::vector<double> per_subject(panel.num_subjects());
  for (int w = 0; w < panel.num_subjects(); ++w) {
    const std::vector<double> bk = fit(panel.series(w, k), columns_k, xtx_k);
    const std::vector<double> bl = fit(panel.series(w, l), columns_l, xtx_l);
    per_subject[w] = abs_corr_or_nan(bk, bl);
  }
  return finish(FcMethod::beta_series, std::move(per_subject), "beta_series");
}

MethodEstimate coherence_fc(const BoldPanel& panel, const std::string& node_k,
                            const std::string& node_l,
                            const FrequencyBand& band,
                            const WelchParams& params,
                            std::vector<CurvePoint>* mean_curve) {
  const int k = panel.node_index(node_k);
  const int l = panel.node_index(node_l);
  const int len = panel.grid().num_points();
  if (len < 64)
    throw std::invalid_argument("coherence_fc: need at least 64 time points");
  const int L =
      params.segment_length > 0 ? params.segment_length : std::min(64, len / 2);
  if (L < 8 || L > len)
    throw std::invalid_argument("coherence_fc: bad segment length");
  const int hop = L / 2;
  std::vector<int> starts;
  for (int s = 0; s + L <= len; s += hop) starts.push_back(s);
  if (starts.size() < 2)
    throw std::invalid_argument(
        "coherence_fc: need at least two Welch segments (single-segment "
        "coherence is identically one)");

  validate_band(band, panel.grid());
  const double bin_width = 1.0 / (L * panel.grid().delta());
  std::vector<int> bins;
  for (int m = 1; m <= L / 2; ++m) {
    const double f = m * bin_width;
    if (f > band.lower && f < band.upper) bins.push_back(m);
  }
  if (bins.empty())
    throw EmptyBandError("coherence_fc: no Welch bin inside the band");

  std::vector<double> window(L);
  for (int j = 0; j < L; ++j)
    window[j] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * j / L);

  // DFT kernel per (bin, sample).
  std::vector<std::complex<double>> kernel(bins.size() * L);
  for (std::size_t b = 0; b < bins.size(); ++b)
    for (int j = 0; j < L; ++j) {
      const double phase = -2.0 * std::numbers::pi * bins[b] * j / L;
      kernel[b * L + j] = {std::cos(phase), std::sin(phase)};
    }

  std::vector<double> per_subject(panel.num_subjects());
  std::vector<double> wk(L), wl(L);
  std::vector<double> curve_sum(bins.size(), 0.0);
  std::vector<int> curve_count(bins.size(), 0);
  for (int w = 0; w < panel.num_subjects(); ++w) {
    const auto sk = panel.series(w, k);
    const auto sl = panel.series(w, l);
    std::vector<double> pkk(bins.size(), 0.0), pll(bins.size(), 0.0);
    std::vector<std::complex<double>> pkl(bins.size(), 0.0);
    for (int start : starts) {
      double mk = 0.0, ml = 0.0;
      for (int j = 0; j < L; ++j) {
        mk += sk[start + j];
        ml += sl[start + j];
      }
      mk /= L;
      ml /= L;
      for (int j = 0; j < L; ++j) {
        wk[j] = window[j] * (sk[start + j] - mk);
        wl[j] = window[j] * (sl[start + j] - ml);
      }
      for (std::size_t b = 0; b < bins.size(); ++b) {
        std::complex<double> xk = 0.0, xl = 0.0;
        for (int j = 0; j < L; ++j) {
          xk += wk[j] * kernel[b * L + j];
          xl += wl[j] * kernel[b * L + j];
        }
        pkk[b] += std::norm(xk);
        pll[b] += std::norm(xl);
        pkl[b] += std::conj(xk) * xl;
      }
    }
    std::vector<double> coherence;
    for (std::size_t b = 0; b < bins.size(); ++b) {
      const double denom = pkk[b] * pll[b];
      if (denom <= 1e-30) continue;  // zero auto-spectrum: drop the bin
      const double coh = std::min(std::abs(pkl[b]) / std::sqrt(denom), 1.0);
      coherence.push_back(coh);
      curve_sum[b] += coh;
      ++curve_count[b];
    }
    per_subject[w] =
        coherence.empty() ? std::nan("") : detail::lower_median(coherence);
  }
  if (mean_curve) {
    mean_curve->clear();
    for (std::size_t b = 0; b < bins.size(); ++b)
      mean_curve->push_back({bins[b] * bin_width,
                             curve_count[b]    ? curve_sum[b] / curve_count[b]
                                               : std::nan("")});
  }
  return finish(FcMethod::coherence, std::move(per_subject), "coherence_fc");
}

}  // namespace taskfc
