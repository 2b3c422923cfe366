#include "taskfc/simgen.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "taskfc/rng.hpp"

namespace taskfc {

namespace {

constexpr double kBaseline = 9000.0;
constexpr double kNoiseVariance = 30.0;

// Lower Cholesky factor of a K x K covariance; throws on non-PSD input.
std::vector<double> cholesky(const std::vector<double>& cov, int K,
                             const char* what) {
  std::vector<double> L(static_cast<std::size_t>(K) * K, 0.0);
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = cov[i * K + j];
      for (int m = 0; m < j; ++m) sum -= L[i * K + m] * L[j * K + m];
      if (i == j) {
        if (!(sum > 0.0))
          throw std::invalid_argument(std::string(what) +
                                      ": covariance is not positive definite");
        L[i * K + i] = std::sqrt(sum);
      } else {
        L[i * K + j] = sum / L[j * K + j];
      }
    }
  }
  return L;
}

std::vector<double> correlated_normals(CounterRng& rng,
                                       const std::vector<double>& chol, int K) {
  std::vector<double> z(K), out(K, 0.0);
  for (int i = 0; i < K; ++i) z[i] = rng.next_normal();
  for (int i = 0; i < K; ++i)
    for (int j = 0; j <= i; ++j) out[i] += chol[i * K + j] * z[j];
  return out;
}

std::vector<double> beta_covariance(const MechanismConfig& config) {
  const double f = std::sqrt(2.0 * 3.0);
  if (config.mechanism == Mechanism::m0) {
    const double r = config.rho[0];
    return {2.0, r * f, r * f, 3.0};
  }
  const double r12 = config.rho[0], r23 = config.rho[1];
  return {2.0,     r12 * f, 0.0,      //
          r12 * f, 3.0,     r23 * f,  //
          0.0,     r23 * f, 2.0};
}

std::vector<double> nuisance_covariance(int K) {
  const double f = 0.3 * std::sqrt(2.0 * 3.0);
  if (K == 2) return {2.0, f, f, 3.0};
  return {2.0, f,   0.0,  //
          f,   3.0, f,    //
          0.0, f,   2.0};
}

std::vector<std::string> default_labels(int K) {
  std::vector<std::string> labels;
  for (int k = 0; k < K; ++k) labels.push_back("node" + std::to_string(k + 1));
  return labels;
}

std::vector<std::string> default_subjects(int n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  char buf[16];
  for (int w = 0; w < n; ++w) {
    std::snprintf(buf, sizeof buf, "subj%05d", w + 1);
    ids.emplace_back(buf);
  }
  return ids;
}

struct Regressors {
  std::vector<SampledSignal> task;                   // per node
  std::vector<std::vector<SampledSignal>> nuisance;  // per node, per stimulus
};

Regressors build_regressors(const TimeGrid& grid, int K) {
  const StandardStimuli stimuli = standard_stimuli(grid);
  Regressors regressors;
  for (int k = 0; k < K; ++k) {
    const HrfSpec hrf = mechanism_hrf(k);
    regressors.task.push_back(generation_regressor(stimuli.task, hrf));
    std::vector<SampledSignal> per_node;
    for (const SampledSignal& nuisance : stimuli.nuisance)
      per_node.push_back(generation_regressor(nuisance, hrf));
    regressors.nuisance.push_back(std::move(per_node));
  }
  return regressors;
}

}  // namespace

void MechanismConfig::validate() const {
  const std::size_t expected = mechanism == Mechanism::m0 ? 1 : 2;
  if (rho.size() != expected)
    throw std::invalid_argument("MechanismConfig: wrong number of rho values");
  for (double r : rho)
    if (!(r >= 0.0 && r < 1.0))
      throw std::invalid_argument("MechanismConfig: rho must lie in [0,1)");
  if (n < 2) throw std::invalid_argument("MechanismConfig: need n >= 2");
  if (!(noise_scale >= 0.0))
    throw std::invalid_argument("MechanismConfig: noise scale must be >= 0");
}

std::vector<Interval> standard_task_intervals() {
  return {{86.5, 98.5}, {162.0, 174.0}};
}

std::vector<std::vector<Interval>> standard_nuisance_intervals() {
  return {{{71.35, 83.35}, {177.125, 189.125}},
          {{11.0, 23.0}, {116.63, 128.63}},
          {{26.13, 38.13}, {146.88, 158.88}},
          {{56.26, 68.26}, {131.75, 143.75}}};
}

StandardStimuli standard_stimuli(const TimeGrid& grid) {
  if (grid.span() < 204.0)
    throw std::invalid_argument("standard_stimuli: grid shorter than the design (204 s)");
  const auto task = standard_task_intervals();
  StandardStimuli out{boxcar_stimulus(task, grid), {}};
  for (const auto& intervals : standard_nuisance_intervals())
    out.nuisance.push_back(boxcar_stimulus(intervals, grid));
  return out;
}

HrfSpec mechanism_hrf(int node_index) {
  if (node_index == 1) return HrfSpec{8.0, 14.0, 1.0, 1.0, 0.3, 0.0};
  return HrfSpec{4.0, 10.0, 0.8, 0.8, 0.4, 0.0};
}

SampledSignal generation_regressor(const SampledSignal& stimulus,
                                   const HrfSpec& hrf) {
  // Convolution sum at microtime resolution (0.1 s), the rate block-design
  // generators conventionally evaluate the HRF at, then read off at the
  // scan instants. Amplitude is what sets the task-to-noise ratio of the
  // generated traces.
  constexpr double kMicrotime = 0.1;
  SampledSignal normalized =
      circular_convolve(stimulus, canonical_hrf(hrf, stimulus.grid()));
  std::vector<double> values(normalized.values());
  const double scale = stimulus.size() * stimulus.grid().delta() / kMicrotime;
  for (double& v : values) v *= scale;
  return SampledSignal(stimulus.grid(), std::move(values));
}

std::vector<double> draw_mechanism_betas(const MechanismConfig& config) {
  config.validate();
  if (config.mechanism == Mechanism::m2) return {};
  const int K = config.num_nodes();
  const std::vector<double> chol =
      cholesky(beta_covariance(config), K, "draw_mechanism_betas");
  std::vector<double> betas(static_cast<std::size_t>(config.n) * K);
  for (int w = 0; w < config.n; ++w) {
    CounterRng rng(config.seed, stream::kBetas, static_cast<std::uint32_t>(w));
    const std::vector<double> b = correlated_normals(rng, chol, K);
    for (int k = 0; k < K; ++k) betas[static_cast<std::size_t>(w) * K + k] = b[k];
  }
  return betas;
}

namespace {

SyntheticDataset generate_with_betas(const MechanismConfig& config) {
  const int K = config.num_nodes();
  const int n = config.n;
  const int len = config.grid.num_points();
  const Regressors regressors = build_regressors(config.grid, K);
  const std::vector<double> betas = draw_mechanism_betas(config);
  const std::vector<double> nuisance_chol =
      cholesky(nuisance_covariance(K), K, "generate");
  const double noise_sd = std::sqrt(kNoiseVariance * config.noise_scale);

  std::vector<double> data(static_cast<std::size_t>(n) * K * len);
  for (int w = 0; w < n; ++w) {
    // Four independent nuisance coefficient vectors per subject.
    std::vector<std::vector<double>> nuisance_betas;
    for (std::uint32_t g = 0; g < 4; ++g) {
      CounterRng rng(config.seed, stream::kNuisance,
                     static_cast<std::uint32_t>(w), g);
      nuisance_betas.push_back(correlated_normals(rng, nuisance_chol, K));
    }
    for (int k = 0; k < K; ++k) {
      CounterRng noise(config.seed, stream::kNoise,
                       static_cast<std::uint32_t>(w),
                       static_cast<std::uint32_t>(k));
      const double beta = betas[static_cast<std::size_t>(w) * K + k];
      double* out = data.data() + (static_cast<std::size_t>(w) * K + k) * len;
      for (int t = 0; t < len; ++t) {
        double v = kBaseline + beta * regressors.task[k][t];
        for (int g = 0; g < 4; ++g)
          v += nuisance_betas[g][k] * regressors.nuisance[k][g][t];
        out[t] = v + noise_sd * noise.next_normal();
      }
    }
  }
  return SyntheticDataset{BoldPanel(config.grid, default_labels(K),
                                    default_subjects(n), std::move(data)),
                          betas, config};
}

}  // namespace

SyntheticDataset generate_mechanism0(const MechanismConfig& config) {
  if (config.mechanism != Mechanism::m0)
    throw std::invalid_argument("generate_mechanism0: wrong mechanism tag");
  return generate_with_betas(config);
}

SyntheticDataset generate_mechanism1(const MechanismConfig& config) {
  if (config.mechanism != Mechanism::m1)
    throw std::invalid_argument("generate_mechanism1: wrong mechanism tag");
  return generate_with_betas(config);
}

SyntheticDataset generate_mechanism2(const MechanismConfig& config) {
  if (config.mechanism != Mechanism::m2)
    throw std::invalid_argument("generate_mechanism2: wrong mechanism tag");
  config.validate();
  const int K = 3;
  const int n = config.n;
  const int len = config.grid.num_points();
  const Regressors regressors = build_regressors(config.grid, K);
  const SampledSignal task_stimulus = standard_stimuli(config.grid).task;

  const double v = kNoiseVariance * config.noise_scale;
  const double r12 = config.rho[0], r23 = config.rho[1];
  const std::vector<double> task_cov = {v,       r12 * v, 0.0,      //
                                        r12 * v, v,       r23 * v,  //
                                        0.0,     r23 * v, v};
  const std::vector<double> task_chol = cholesky(task_cov, K, "generate_mechanism2");
  const double rest_sd = std::sqrt(v);

  std::vector<double> data(static_cast<std::size_t>(n) * K * len);
  for (int w = 0; w < n; ++w) {
    for (int t = 0; t < len; ++t) {
      CounterRng rng(config.seed, stream::kNoise, static_cast<std::uint32_t>(w),
                     static_cast<std::uint32_t>(t));
      std::vector<double> eps(K);
      if (task_stimulus[t] == 1.0) {
        eps = correlated_normals(rng, task_chol, K);
      } else {
        for (int k = 0; k < K; ++k) eps[k] = rest_sd * rng.next_normal();
      }
      for (int k = 0; k < K; ++k) {
        double y = kBaseline + regressors.task[k][t];
        for (int g = 0; g < 4; ++g) y += regressors.nuisance[k][g][t];
        data[(static_cast<std::size_t>(w) * K + k) * len + t] = y + eps[k];
      }
    }
  }
  return SyntheticDataset{BoldPanel(config.grid, default_labels(K),
                                    default_subjects(n), std::move(data)),
                          {}, config};
}

SyntheticDataset generate(const MechanismConfig& config) {
  switch (config.mechanism) {
    case Mechanism::m0: return generate_mechanism0(config);
    case Mechanism::m1: return generate_mechanism1(config);
    case Mechanism::m2: return generate_mechanism2(config);
  }
  throw std::invalid_argument("generate: unknown mechanism");
}

}  // namespace taskfc
