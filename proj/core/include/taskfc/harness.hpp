#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taskfc/fourier.hpp"
#include "taskfc/panel.hpp"
#include "taskfc/simgen.hpp"

namespace taskfc {

/// Estimators the Monte Carlo experiments can run. `ptfce` produces one
/// population value; the others produce a mean-aggregated and a
/// median-aggregated row each.
enum class HarnessMethod { ptfce, naive, task, beta, coherence };

std::string to_string(HarnessMethod method);

struct HarnessOptions {
  int threads = 0;             // 0 = all hardware threads
  std::string rows_path;       // when set, stream one row per replication
  FrequencyBand band = default_band();
};

struct IdentificationRow {
  std::string method;
  std::string aggregation;  // "mean", "median", or "" for ptfce
  int correct = 0;
  int failures = 0;
  double rate = 0.0;
  double ci_half_width = 0.0;
};

/// Identification rates p = correct/reps with the half-width
/// 1.6449 * sqrt(p (1-p) / reps).
struct IdentificationReport {
  Mechanism mechanism;
  int n;
  int reps;
  std::vector<IdentificationRow> rows;
};

/// Per replication: generate data with targets (0.4, 0.6), estimate pairs
/// (1,2) and (2,3) with every requested method, count a success when the
/// weak pair's estimate is strictly below the strong pair's. Exact ties are
/// resolved by a fair coin from the replication's stream; a method failure
/// counts as incorrect and is tallied separately.
IdentificationReport identification_experiment(
    Mechanism mechanism, int n, int reps,
    const std::vector<HarnessMethod>& methods, std::uint64_t seed,
    const HarnessOptions& options = {});

struct BiasRow {
  double rho;
  int n;
  int reps;
  double mean;
  double sd;
  double relative_bias;  // (mean - rho) / rho; NaN when rho == 0
};

/// Replication mean/sd of the pair estimate on fresh two-node synthetic data
/// for each (rho, n) combination.
std::vector<BiasRow> bias_experiment(std::span<const double> rhos,
                                     std::span<const int> ns, int reps,
                                     std::uint64_t seed,
                                     const HarnessOptions& options = {});

struct NoiseSweepRow {
  double lambda;
  int reps;
  double mean;
};

struct NoiseSweepOptions : HarnessOptions {
  /// Bypass reference extraction and use the generator's true reference
  /// terms (oracle configuration for calibration tests).
  bool oracle_references = false;
};

/// Replication-mean estimate as a function of the noise scale.
std::vector<NoiseSweepRow> noise_sweep(std::span<const double> lambdas,
                                       double rho, int n, int reps,
                                       std::uint64_t seed,
                                       const NoiseSweepOptions& options = {});

/// Affine map of the values onto [0,1]; requires max > min.
std::vector<double> minmax_standardize(std::span<const double> values);

/// Strictly-greater threshold comparison.
std::vector<bool> threshold_classify(std::span<const double> values,
                                     double threshold);

struct KappaResult {
  double kappa;
  double observed_agreement;
  double expected_agreement;
  double z_statistic;
  double p_value;  // one-sided, large-sample null SE sqrt(p_e / (N (1-p_e)))
};

/// Cohen's kappa from the 2x2 contingency table of two classifications.
/// Throws UndefinedKappaError when the expected agreement is one.
KappaResult cohens_kappa(const std::vector<bool>& a, const std::vector<bool>& b);

/// Agreement analysis across methods on one panel: per-pair estimates per
/// method, min-max standardization, 0.5 thresholding, pairwise kappas.
/// Methods whose estimates are constant (standardization undefined) are
/// excluded and reported.
struct CompareMethodResult {
  std::string method;
  std::string aggregation;
  std::vector<double> values;
  std::vector<double> standardized;
  std::vector<bool> classified;
};

struct CompareReport {
  std::vector<std::string> pair_labels;
  std::vector<CompareMethodResult> methods;
  std::vector<std::string> excluded_methods;
  std::vector<double> kappa;    // m x m row-major over included methods
  std::vector<double> kappa_p;  // matching p-values (NaN on the diagonal)
};

struct CompareOptions {
  FrequencyBand band = default_band();
  double threshold = 0.5;
  std::string seed_node;  // when set, pairs are (seed_node, other)
  std::vector<HrfSpec> hrfs;  // per node; empty = canonical everywhere
};

CompareReport compare_methods(const BoldPanel& panel,
                              const SampledSignal& stimulus,
                              const std::vector<HarnessMethod>& methods,
                              std::uint64_t seed,
                              const CompareOptions& options = {});

}  // namespace taskfc
