#include "taskfc/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"
#include "stats_util.hpp"
#include "taskfc/competitors.hpp"
#include "taskfc/errors.hpp"
#include "taskfc/io.hpp"
#include "taskfc/ptfce.hpp"
#include "taskfc/rng.hpp"

namespace taskfc {

namespace {

constexpr double kZ95 = 1.6449;  // 0.95-quantile of the standard normal

constexpr std::uint32_t kTagIdentification = 0xA1;
constexpr std::uint32_t kTagBias = 0xA2;
constexpr std::uint32_t kTagSweep = 0xA3;

struct RowKey {
  HarnessMethod method;
  std::string aggregation;  // "", "mean", "median"
};

std::vector<RowKey> expand_rows(const std::vector<HarnessMethod>& methods) {
  std::vector<RowKey> rows;
  std::set<HarnessMethod> seen;
  for (HarnessMethod m : methods) {
    if (!seen.insert(m).second) continue;
    if (m == HarnessMethod::ptfce) {
      rows.push_back({m, ""});
    } else {
      rows.push_back({m, "mean"});
      rows.push_back({m, "median"});
    }
  }
  return rows;
}

struct PairValues {
  double weak = std::nan("");
  double strong = std::nan("");
  bool failed = false;
};

enum class Outcome { incorrect = 0, correct = 1, failure = 2 };

Outcome judge(const PairValues& values, std::uint64_t rep_seed, int row_index) {
  if (values.failed || !std::isfinite(values.weak) ||
      !std::isfinite(values.strong))
    return Outcome::failure;
  if (values.weak < values.strong) return Outcome::correct;
  if (values.weak > values.strong) return Outcome::incorrect;
  CounterRng coin(rep_seed, stream::kCoin, static_cast<std::uint32_t>(row_index));
  return coin.next_unit() < 0.5 ? Outcome::correct : Outcome::incorrect;
}

/// Append-only replication log with enough columns to resume a crashed run.
class RowLog {
 public:
  explicit RowLog(const std::string& path, const std::string& header)
      : path_(path) {
    if (path_.empty()) return;
    if (!std::filesystem::exists(path_)) {
      std::ofstream out(path_);
      out << header << "\n";
    }
  }

  bool enabled() const { return !path_.empty(); }

  std::vector<std::vector<std::string>> existing_rows() const {
    std::vector<std::vector<std::string>> rows;
    if (path_.empty()) return rows;
    std::ifstream in(path_);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (first) {
        first = false;
        continue;
      }
      if (line.empty()) continue;
      std::vector<std::string> fields;
      std::stringstream ss(line);
      std::string field;
      while (std::getline(ss, field, ',')) fields.push_back(field);
      rows.push_back(std::move(fields));
    }
    return rows;
  }

  void append(const std::string& line) {
    if (path_.empty()) return;
    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::app);
    out << line << "\n";
    out.flush();
  }

 private:
  std::string path_;
  std::mutex mutex_;
};

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

std::vector<HrfSpec> canonical_hrfs(int count) {
  return std::vector<HrfSpec>(count, HrfSpec::canonical());
}

}  // namespace

std::string to_string(HarnessMethod method) {
  switch (method) {
    case HarnessMethod::ptfce: return "ptfce";
    case HarnessMethod::naive: return "naive_pearson";
    case HarnessMethod::task: return "task_pearson";
    case HarnessMethod::beta: return "beta_series";
    case HarnessMethod::coherence: return "coherence";
  }
  return "unknown";
}

IdentificationReport identification_experiment(
    Mechanism mechanism, int n, int reps,
    const std::vector<HarnessMethod>& methods, std::uint64_t seed,
    const HarnessOptions& options) {
  if (mechanism == Mechanism::m0)
    throw std::invalid_argument(
        "identification_experiment: needs a three-node mechanism");
  if (reps < 1)
    throw std::invalid_argument("identification_experiment: reps must be >= 1");
  const std::vector<RowKey> rows = expand_rows(methods);
  const int num_rows = static_cast<int>(rows.size());

  RowLog log(options.rows_path,
             "rep,method,aggregation,weak_estimate,strong_estimate,outcome");
  // outcomes[rep * num_rows + row]; -1 marks "not yet computed".
  std::vector<int> outcomes(static_cast<std::size_t>(reps) * num_rows, -1);
  if (log.enabled()) {
    std::map<std::pair<std::string, std::string>, int> row_of;
    for (int i = 0; i < num_rows; ++i)
      row_of[{to_string(rows[i].method), rows[i].aggregation}] = i;
    for (const auto& fields : log.existing_rows()) {
      if (fields.size() != 6) continue;
      const int rep = std::stoi(fields[0]);
      const auto it = row_of.find({fields[1], fields[2]});
      if (rep < 0 || rep >= reps || it == row_of.end()) continue;
      outcomes[static_cast<std::size_t>(rep) * num_rows + it->second] =
          fields[5] == "correct" ? 1 : (fields[5] == "failure" ? 2 : 0);
    }
  }

  detail::parallel_for(reps, options.threads, [&](int rep) {
    bool complete = true;
    for (int i = 0; i < num_rows; ++i)
      if (outcomes[static_cast<std::size_t>(rep) * num_rows + i] < 0)
        complete = false;
    if (complete) return;

    const std::uint64_t rep_seed =
        derive_seed(seed, kTagIdentification, static_cast<std::uint32_t>(rep));
    MechanismConfig config;
    config.mechanism = mechanism;
    config.n = n;
    config.rho = {0.4, 0.6};
    config.seed = rep_seed;
    const SyntheticDataset dataset = generate(config);
    const BoldPanel& panel = dataset.panel;
    const SampledSignal stimulus = standard_stimuli(panel.grid()).task;
    const HrfSpec canonical = HrfSpec::canonical();

    // One computation per method; mean/median rows read different aggregates.
    std::map<HarnessMethod, std::pair<MethodEstimate, MethodEstimate>> computed;
    auto competitor_pair = [&](HarnessMethod m) -> const auto& {
      auto it = computed.find(m);
      if (it == computed.end()) {
        auto run = [&](const std::string& a, const std::string& b) {
          switch (m) {
            case HarnessMethod::naive: return naive_pearson(panel, a, b);
            case HarnessMethod::task: return task_pearson(panel, a, b, stimulus);
            case HarnessMethod::beta:
              return beta_series(panel, a, b, stimulus, canonical, canonical);
            case HarnessMethod::coherence:
              return coherence_fc(panel, a, b, options.band);
            default:
              throw std::logic_error("not a competitor method");
          }
        };
        it = computed
                 .emplace(m, std::make_pair(run("node1", "node2"),
                                            run("node2", "node3")))
                 .first;
      }
      return it->second;
    };

    for (int i = 0; i < num_rows; ++i) {
      PairValues values;
      try {
        if (rows[i].method == HarnessMethod::ptfce) {
          values.weak = ptfce_estimate(panel, "node1", "node2", stimulus,
                                       canonical, canonical, options.band,
                                       rep_seed)
                            .estimate;
          values.strong = ptfce_estimate(panel, "node2", "node3", stimulus,
                                         canonical, canonical, options.band,
                                         rep_seed)
                              .estimate;
        } else {
          const auto& [weak, strong] = competitor_pair(rows[i].method);
          if (rows[i].aggregation == "mean") {
            values.weak = weak.mean_aggregate;
            values.strong = strong.mean_aggregate;
          } else {
            values.weak = weak.median_aggregate;
            values.strong = strong.median_aggregate;
          }
        }
      } catch (const std::exception&) {
        values.failed = true;
      }
      const Outcome outcome = judge(values, rep_seed, i);
      outcomes[static_cast<std::size_t>(rep) * num_rows + i] =
          static_cast<int>(outcome);
      log.append(std::to_string(rep) + "," + to_string(rows[i].method) + "," +
                 rows[i].aggregation + "," + format_double(values.weak) + "," +
                 format_double(values.strong) + "," +
                 (outcome == Outcome::correct
                      ? "correct"
                      : outcome == Outcome::failure ? "failure" : "incorrect"));
    }
  });

  IdentificationReport report{mechanism, n, reps, {}};
  for (int i = 0; i < num_rows; ++i) {
    IdentificationRow row;
    row.method = to_string(rows[i].method);
    row.aggregation = rows[i].aggregation;
    for (int rep = 0; rep < reps; ++rep) {
      const int outcome = outcomes[static_cast<std::size_t>(rep) * num_rows + i];
      if (outcome == 1) ++row.correct;
      if (outcome == 2) ++row.failures;
    }
    row.rate = static_cast<double>(row.correct) / reps;
    row.ci_half_width = kZ95 * std::sqrt(row.rate * (1.0 - row.rate) / reps);
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

double mechanism0_estimate(double rho, int n, double noise_scale,
                           std::uint64_t rep_seed, const FrequencyBand& band,
                           bool oracle_references) {
  MechanismConfig config;
  config.mechanism = Mechanism::m0;
  config.n = n;
  config.rho = {rho};
  config.noise_scale = noise_scale;
  config.seed = rep_seed;
  const SyntheticDataset dataset = generate_mechanism0(config);
  const BoldPanel& panel = dataset.panel;
  const SampledSignal stimulus = standard_stimuli(panel.grid()).task;

  if (!oracle_references) {
    const HrfSpec canonical = HrfSpec::canonical();
    return ptfce_estimate(panel, "node1", "node2", stimulus, canonical,
                          canonical, band, rep_seed)
        .estimate;
  }

  // Oracle configuration: subtract the known task component, so the
  // references are the generator's true reference terms (demeaned along
  // with the subject's trace).
  const int len = panel.grid().num_points();
  std::vector<SampledSignal> regs;
  for (int k = 0; k < 2; ++k)
    regs.push_back(demeaned(
        generation_regressor(stimulus, mechanism_hrf(k))));
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(n) * 2 * len);
  std::vector<SampledSignal> refs[2];
  for (int w = 0; w < n; ++w) {
    for (int k = 0; k < 2; ++k) {
      const SampledSignal y = demeaned(panel.signal(w, k));
      const double beta = dataset.latent_betas[static_cast<std::size_t>(w) * 2 + k];
      std::vector<double> ref(len);
      for (int t = 0; t < len; ++t) ref[t] = y[t] - beta * regs[k][t];
      refs[k].emplace_back(panel.grid(), std::move(ref));
      data.insert(data.end(), y.values().begin(), y.values().end());
    }
  }
  const BoldPanel centered(panel.grid(), panel.node_labels(),
                           panel.subject_ids(), std::move(data));
  return ptfce_estimate_with_references(centered, "node1", "node2", refs[0],
                                        refs[1], band, rep_seed)
      .estimate;
}

}  // namespace

std::vector<BiasRow> bias_experiment(std::span<const double> rhos,
                                     std::span<const int> ns, int reps,
                                     std::uint64_t seed,
                                     const HarnessOptions& options) {
  if (reps < 2) throw std::invalid_argument("bias_experiment: reps must be >= 2");
  RowLog log(options.rows_path, "rho,n,rep,estimate");
  std::map<std::tuple<double, int, int>, double> cached;
  for (const auto& fields : log.existing_rows()) {
    if (fields.size() != 4) continue;
    cached[{std::stod(fields[0]), std::stoi(fields[1]), std::stoi(fields[2])}] =
        std::stod(fields[3]);
  }

  std::vector<BiasRow> table;
  for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
      const double rho = rhos[ri];
      const int n = ns[ni];
      const std::uint32_t combo =
          static_cast<std::uint32_t>(ri * ns.size() + ni);
      std::vector<double> estimates(reps);
      detail::parallel_for(reps, options.threads, [&](int rep) {
        const auto hit = cached.find({rho, n, rep});
        if (hit != cached.end()) {
          estimates[rep] = hit->second;
          return;
        }
        const std::uint64_t rep_seed = derive_seed(
            derive_seed(seed, kTagBias, combo), kTagBias, static_cast<std::uint32_t>(rep));
        estimates[rep] =
            mechanism0_estimate(rho, n, 1.0, rep_seed, options.band, false);
        log.append(format_double(rho) + "," + std::to_string(n) + "," +
                   std::to_string(rep) + "," + format_double(estimates[rep]));
      });
      const double mean = detail::mean_of(estimates);
      table.push_back(BiasRow{rho, n, reps, mean, detail::sample_sd(estimates),
                              rho == 0.0 ? std::nan("") : (mean - rho) / rho});
    }
  }
  return table;
}

std::vector<NoiseSweepRow> noise_sweep(std::span<const double> lambdas,
                                       double rho, int n, int reps,
                                       std::uint64_t seed,
                                       const NoiseSweepOptions& options) {
  if (reps < 1) throw std::invalid_argument("noise_sweep: reps must be >= 1");
  for (double lambda : lambdas)
    if (!(lambda >= 0.0))
      throw std::invalid_argument("noise_sweep: lambda must be >= 0");
  RowLog log(options.rows_path, "lambda,rep,estimate");
  std::map<std::pair<double, int>, double> cached;
  for (const auto& fields : log.existing_rows()) {
    if (fields.size() != 3) continue;
    cached[{std::stod(fields[0]), std::stoi(fields[1])}] = std::stod(fields[2]);
  }

  std::vector<NoiseSweepRow> table;
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    const double lambda = lambdas[li];
    std::vector<double> estimates(reps);
    detail::parallel_for(reps, options.threads, [&](int rep) {
      const auto hit = cached.find({lambda, rep});
      if (hit != cached.end()) {
        estimates[rep] = hit->second;
        return;
      }
      const std::uint64_t rep_seed =
          derive_seed(derive_seed(seed, kTagSweep, static_cast<std::uint32_t>(li)),
                      kTagSweep, static_cast<std::uint32_t>(rep));
      estimates[rep] = mechanism0_estimate(rho, n, lambda, rep_seed,
                                           options.band, options.oracle_references);
      log.append(format_double(lambda) + "," + std::to_string(rep) + "," +
                 format_double(estimates[rep]));
    });
    table.push_back(NoiseSweepRow{lambda, reps, detail::mean_of(estimates)});
  }
  return table;
}

std::vector<double> minmax_standardize(std::span<const double> values) {
  double lo = INFINITY, hi = -INFINITY;
  for (double v : values) {
    if (!std::isfinite(v))
      throw std::invalid_argument("minmax_standardize: values must be finite");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo))
    throw std::invalid_argument("minmax_standardize: constant input");
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back((v - lo) / (hi - lo));
  return out;
}

std::vector<bool> threshold_classify(std::span<const double> values,
                                     double threshold) {
  std::vector<bool> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(v > threshold);
  return out;
}

KappaResult cohens_kappa(const std::vector<bool>& a,
                         const std::vector<bool>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("cohens_kappa: need equal lengths >= 2");
  const double N = static_cast<double>(a.size());
  double n11 = 0, n00 = 0, na1 = 0, nb1 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    n11 += a[i] && b[i];
    n00 += !a[i] && !b[i];
    na1 += a[i];
    nb1 += b[i];
  }
  const double po = (n11 + n00) / N;
  const double pa = na1 / N, pb = nb1 / N;
  const double pe = pa * pb + (1.0 - pa) * (1.0 - pb);
  if (pe >= 1.0)
    throw UndefinedKappaError("cohens_kappa: expected agreement is one");
  const double kappa = (po - pe) / (1.0 - pe);
  const double se0 = std::sqrt(pe / (N * (1.0 - pe)));
  const double z = kappa / se0;
  return KappaResult{kappa, po, pe, z, normal_sf(z)};
}

CompareReport compare_methods(const BoldPanel& panel,
                              const SampledSignal& stimulus,
                              const std::vector<HarnessMethod>& methods,
                              std::uint64_t seed,
                              const CompareOptions& options) {
  const int K = panel.num_nodes();
  std::vector<HrfSpec> hrfs =
      options.hrfs.empty() ? canonical_hrfs(K) : options.hrfs;
  if (static_cast<int>(hrfs.size()) != K)
    throw std::invalid_argument("compare_methods: one HRF per node required");

  std::vector<std::pair<int, int>> pairs;
  CompareReport report;
  if (!options.seed_node.empty()) {
    const int s = panel.node_index(options.seed_node);
    for (int other = 0; other < K; ++other) {
      if (other == s) continue;
      pairs.emplace_back(s, other);
      report.pair_labels.push_back(options.seed_node + "|" +
                                   panel.node_labels()[other]);
    }
  } else {
    for (int k = 0; k < K; ++k)
      for (int l = k + 1; l < K; ++l) {
        pairs.emplace_back(k, l);
        report.pair_labels.push_back(panel.node_labels()[k] + "|" +
                                     panel.node_labels()[l]);
      }
  }
  if (pairs.size() < 2)
    throw std::invalid_argument("compare_methods: need at least two node pairs");

  std::set<HarnessMethod> seen;
  for (HarnessMethod m : methods) {
    if (!seen.insert(m).second) continue;
    const std::string name = to_string(m);
    std::vector<double> values;
    try {
      if (m == HarnessMethod::ptfce) {
        const PtfcMatrix matrix =
            ptfce_matrix(panel, stimulus, hrfs, options.band, seed);
        for (const auto& [k, l] : pairs) values.push_back(matrix.at(k, l));
      } else {
        for (const auto& [k, l] : pairs) {
          const std::string& a = panel.node_labels()[k];
          const std::string& b = panel.node_labels()[l];
          switch (m) {
            case HarnessMethod::naive:
              values.push_back(naive_pearson(panel, a, b).mean_aggregate);
              break;
            case HarnessMethod::task:
              values.push_back(
                  task_pearson(panel, a, b, stimulus).mean_aggregate);
              break;
            case HarnessMethod::beta:
              values.push_back(
                  beta_series(panel, a, b, stimulus, hrfs[k], hrfs[l])
                      .mean_aggregate);
              break;
            case HarnessMethod::coherence:
              values.push_back(
                  coherence_fc(panel, a, b, options.band).mean_aggregate);
              break;
            default:
              break;
          }
        }
      }
      for (double v : values)
        if (!std::isfinite(v))
          throw EstimationFailedError(name + ": pair estimate missing");
      std::vector<double> standardized = minmax_standardize(values);
      std::vector<bool> classified =
          threshold_classify(standardized, options.threshold);
      report.methods.push_back(CompareMethodResult{
          name, m == HarnessMethod::ptfce ? "" : "mean", std::move(values),
          std::move(standardized), std::move(classified)});
    } catch (const std::exception& e) {
      report.excluded_methods.push_back(name + ": " + e.what());
    }
  }

  const int M = static_cast<int>(report.methods.size());
  report.kappa.assign(static_cast<std::size_t>(M) * M, std::nan(""));
  report.kappa_p.assign(static_cast<std::size_t>(M) * M, std::nan(""));
  for (int i = 0; i < M; ++i) {
    for (int j = i; j < M; ++j) {
      try {
        const KappaResult result = cohens_kappa(report.methods[i].classified,
                                                report.methods[j].classified);
        report.kappa[i * M + j] = result.kappa;
        report.kappa[j * M + i] = result.kappa;
        if (i != j) {
          report.kappa_p[i * M + j] = result.p_value;
          report.kappa_p[j * M + i] = result.p_value;
        }
      } catch (const UndefinedKappaError&) {
        // left as NaN
      }
    }
  }
  return report;
}

}  // namespace taskfc
