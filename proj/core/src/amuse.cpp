#include "taskfc/amuse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stats_util.hpp"
#include "taskfc/errors.hpp"

namespace taskfc {

namespace {

struct Eig2 {
  double values[2];   // descending
  double vectors[2][2];  // orthonormal columns, column i pairs with values[i]
};

// Closed-form eigendecomposition of [[a, b], [b, c]]. Exact ties keep the
// original channel order (identity basis).
Eig2 sym_eig2(double a, double b, double c) {
  Eig2 out;
  const double scale = std::abs(a) + std::abs(c) + std::abs(b);
  if (std::abs(b) <= 1e-15 * scale || scale == 0.0) {
    if (a >= c) {
      out.values[0] = a;
      out.values[1] = c;
      out.vectors[0][0] = 1.0; out.vectors[1][0] = 0.0;
      out.vectors[0][1] = 0.0; out.vectors[1][1] = 1.0;
    } else {
      out.values[0] = c;
      out.values[1] = a;
      out.vectors[0][0] = 0.0; out.vectors[1][0] = 1.0;
      out.vectors[0][1] = 1.0; out.vectors[1][1] = 0.0;
    }
    return out;
  }
  const double disc = std::hypot(a - c, 2.0 * b);
  const double l1 = 0.5 * (a + c + disc);
  const double l2 = 0.5 * (a + c - disc);
  // Pick the better-conditioned expression for the leading eigenvector.
  double vx, vy;
  if (std::abs(l1 - c) > std::abs(l1 - a)) {
    vx = l1 - c;
    vy = b;
  } else {
    vx = b;
    vy = l1 - a;
  }
  const double norm = std::hypot(vx, vy);
  vx /= norm;
  vy /= norm;
  out.values[0] = l1;
  out.values[1] = l2;
  out.vectors[0][0] = vx;  out.vectors[1][0] = vy;
  out.vectors[0][1] = -vy; out.vectors[1][1] = vx;
  return out;
}

std::vector<double> demeaned_values(const SampledSignal& x) {
  std::vector<double> out(x.values());
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= out.size();
  for (double& v : out) v -= mean;
  return out;
}

// (1/n) sum_tau u(tau) v(tau + lag), circular.
double circular_lagged_product(const std::vector<double>& u,
                               const std::vector<double>& v, int lag) {
  const int n = static_cast<int>(u.size());
  double acc = 0.0;
  int j = lag;
  for (int tau = 0; tau < n; ++tau) {
    acc += u[tau] * v[j];
    if (++j == n) j = 0;
  }
  return acc / n;
}

}  // namespace

Matrix2 lagged_covariance(const SampledSignal& x1, const SampledSignal& x2,
                          long lag_samples) {
  if (!(x1.grid() == x2.grid()))
    throw std::invalid_argument("lagged_covariance: signals on different grids");
  const int lag = x1.grid().wrap(lag_samples);
  const std::vector<double> d1 = demeaned_values(x1);
  const std::vector<double> d2 = demeaned_values(x2);
  Matrix2 m;
  m[0][0] = circular_lagged_product(d1, d1, lag);
  m[0][1] = circular_lagged_product(d1, d2, lag);
  m[1][0] = circular_lagged_product(d2, d1, lag);
  m[1][1] = circular_lagged_product(d2, d2, lag);
  return m;
}

AmuseDecomposition amuse_decompose(const SampledSignal& x1,
                                   const SampledSignal& x2, long lag_samples) {
  if (!(x1.grid() == x2.grid()))
    throw std::invalid_argument("amuse_decompose: signals on different grids");
  if (lag_samples < 1)
    throw std::invalid_argument("amuse_decompose: lag must be at least 1");
  const int n = x1.size();
  const int lag = x1.grid().wrap(lag_samples);

  const std::vector<double> d1 = demeaned_values(x1);
  const std::vector<double> d2 = demeaned_values(x2);

  const double c00 = circular_lagged_product(d1, d1, 0);
  const double c01 = circular_lagged_product(d1, d2, 0);
  const double c11 = circular_lagged_product(d2, d2, 0);

  const Eig2 white = sym_eig2(c00, c01, c11);
  if (!(white.values[1] > 1e-12 * std::max(white.values[0], 1e-300)))
    throw DegenerateInputError("amuse_decompose: lag-0 covariance is singular");

  // Whitened channels z = D^{-1/2} E^T (d1, d2).
  std::vector<double> z1(n), z2(n);
  const double inv_s0 = 1.0 / std::sqrt(white.values[0]);
  const double inv_s1 = 1.0 / std::sqrt(white.values[1]);
  for (int t = 0; t < n; ++t) {
    z1[t] = inv_s0 * (white.vectors[0][0] * d1[t] + white.vectors[1][0] * d2[t]);
    z2[t] = inv_s1 * (white.vectors[0][1] * d1[t] + white.vectors[1][1] * d2[t]);
  }

  const double m00 = circular_lagged_product(z1, z1, lag);
  const double m01 = circular_lagged_product(z1, z2, lag);
  const double m10 = circular_lagged_product(z2, z1, lag);
  const double m11 = circular_lagged_product(z2, z2, lag);
  const Eig2 rot = sym_eig2(m00, 0.5 * (m01 + m10), m11);

  std::vector<double> s1(n), s2(n);
  for (int t = 0; t < n; ++t) {
    s1[t] = rot.vectors[0][0] * z1[t] + rot.vectors[1][0] * z2[t];
    s2[t] = rot.vectors[0][1] * z1[t] + rot.vectors[1][1] * z2[t];
  }

  // mixing = E D^{1/2} V, so that mixing * sources == demeaned channels.
  const double sq0 = std::sqrt(white.values[0]);
  const double sq1 = std::sqrt(white.values[1]);
  Matrix2 mixing;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      mixing[r][c] = white.vectors[r][0] * sq0 * rot.vectors[0][c] +
                     white.vectors[r][1] * sq1 * rot.vectors[1][c];

  // Unit sample variance and a positive maximum-magnitude sample per source.
  std::vector<double>* sources[2] = {&s1, &s2};
  for (int i = 0; i < 2; ++i) {
    std::vector<double>& s = *sources[i];
    const double sd = std::sqrt(circular_lagged_product(s, s, 0));
    double peak = 0.0;
    for (double v : s)
      if (std::abs(v) > std::abs(peak)) peak = v;
    const double factor = (peak < 0.0 ? -1.0 : 1.0) / sd;
    for (double& v : s) v *= factor;
    mixing[0][i] /= factor;
    mixing[1][i] /= factor;
  }

  return AmuseDecomposition{
      mixing,
      {SampledSignal(x1.grid(), std::move(s1)),
       SampledSignal(x1.grid(), std::move(s2))},
      0,
      rot.values[0] - rot.values[1],
      rot.values[0] - rot.values[1] < 1e-10};
}

int select_task_source(const AmuseDecomposition& decomposition,
                       const SampledSignal& regressor) {
  if (!(regressor.grid() == decomposition.sources[0].grid()))
    throw std::invalid_argument("select_task_source: regressor grid mismatch");
  double best = -1.0;
  int index = 1;
  for (int i = 0; i < 2; ++i) {
    const auto corr = detail::pearson(decomposition.sources[i].values(),
                                      regressor.values());
    if (!corr)
      throw std::invalid_argument("select_task_source: constant regressor");
    if (std::abs(*corr) > best) {
      best = std::abs(*corr);
      index = i + 1;
    }
  }
  return index;
}

ReferenceExtraction extract_reference(const SampledSignal& bold,
                                      const SampledSignal& stimulus,
                                      const HrfSpec& hrf, long shift_samples,
                                      long lag_samples) {
  if (!(bold.grid() == stimulus.grid()))
    throw std::invalid_argument("extract_reference: stimulus grid mismatch");
  const SampledSignal regressor = task_regressor(stimulus, hrf);
  const double center = time_average(regressor);

  const int n = bold.size();
  const int shift = bold.grid().wrap(shift_samples);
  std::vector<double> ch2(n);
  double lo = INFINITY, hi = -INFINITY;
  for (int t = 0; t < n; ++t) {
    ch2[t] = regressor[(t - shift + n) % n] - center;
    lo = std::min(lo, ch2[t]);
    hi = std::max(hi, ch2[t]);
  }
  if (lo == hi)
    throw std::invalid_argument("extract_reference: stimulus yields a constant regressor");

  const SampledSignal shifted_bold = circular_shift(bold, shift);
  const SampledSignal shifted_regressor(bold.grid(), std::move(ch2));

  AmuseDecomposition decomposition =
      amuse_decompose(shifted_bold, shifted_regressor, lag_samples);
  const int task_index = select_task_source(decomposition, shifted_regressor);
  decomposition.task_source_index = task_index;

  const SampledSignal& task_source = decomposition.sources[task_index - 1];
  const double weight = decomposition.mixing[0][task_index - 1];
  std::vector<double> task_values(n);
  for (int t = 0; t < n; ++t) task_values[t] = weight * task_source[t];
  SampledSignal task_component(bold.grid(), std::move(task_values));

  std::vector<double> reference(n);
  for (int t = 0; t < n; ++t)
    reference[t] = bold[t] - task_component[(t + shift) % n];

  return ReferenceExtraction{std::move(task_component),
                             SampledSignal(bold.grid(), std::move(reference)),
                             task_index, decomposition.non_identifiable};
}

}  // namespace taskfc
