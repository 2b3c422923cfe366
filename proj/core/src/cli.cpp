#include "taskfc/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "taskfc/competitors.hpp"
#include "taskfc/errors.hpp"
#include "taskfc/harness.hpp"
#include "taskfc/io.hpp"
#include "taskfc/ptfce.hpp"
#include "taskfc/simgen.hpp"

namespace taskfc {

namespace {

using nlohmann::json;

std::string utc_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(flag) + ": bad number '" + item + "'");
    }
  }
  if (out.empty())
    throw std::invalid_argument(std::string(flag) + ": empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
  std::vector<int> out;
  for (double v : parse_double_list(text, flag)) {
    if (v != std::floor(v))
      throw std::invalid_argument(std::string(flag) + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

HrfSpec parse_hrf(const std::string& text) {
  const std::vector<double> v = parse_double_list(text, "--hrf");
  if (v.size() != 5 && v.size() != 6)
    throw std::invalid_argument("--hrf: expected a1,a2,b1,b2,c[,latency]");
  HrfSpec spec{v[0], v[1], v[2], v[3], v[4], v.size() == 6 ? v[5] : 0.0};
  spec.validate();
  return spec;
}

FrequencyBand parse_band(const std::string& text) {
  const std::vector<double> v = parse_double_list(text, "--band");
  if (v.size() != 2)
    throw std::invalid_argument("--band: expected LO,HI");
  return FrequencyBand{v[0], v[1]};
}

HarnessMethod parse_method(const std::string& name) {
  if (name == "ptfce") return HarnessMethod::ptfce;
  if (name == "naive") return HarnessMethod::naive;
  if (name == "task") return HarnessMethod::task;
  if (name == "beta") return HarnessMethod::beta;
  if (name == "coherence") return HarnessMethod::coherence;
  throw std::invalid_argument("unknown method '" + name + "'");
}

std::vector<HarnessMethod> parse_method_list(const std::string& text) {
  std::vector<HarnessMethod> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_method(item));
  if (out.empty()) throw std::invalid_argument("--methods: empty list");
  return out;
}

json band_json(const FrequencyBand& band) {
  return {{"lower", band.lower}, {"upper", band.upper}};
}

json curve_json(const std::vector<CurvePoint>& curve) {
  json arr = json::array();
  for (const CurvePoint& p : curve) {
    json entry = {{"frequency", p.frequency}};
    if (std::isfinite(p.value))
      entry["value"] = p.value;
    else
      entry["value"] = nullptr;
    arr.push_back(entry);
  }
  return arr;
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

void emit_manifest(const std::string& command,
                   const std::vector<std::string>& argv, const json& config,
                   std::uint64_t seed,
                   const std::vector<std::filesystem::path>& inputs,
                   const std::string& started,
                   const std::filesystem::path& out_path) {
  RunManifest manifest;
  manifest.command = command;
  manifest.argv = argv;
  manifest.config_json = config.dump();
  manifest.seed = seed;
  manifest.version = kVersion;
  for (const auto& input : inputs)
    manifest.inputs.push_back({input.string(), fnv1a64_file(input)});
  manifest.started_at = started;
  manifest.finished_at = utc_now();
  write_manifest(manifest, out_path);
}

void write_curve_csv(const std::vector<CurvePoint>& curve,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path.string() + "'");
  out << "frequency,value\n";
  for (const CurvePoint& p : curve)
    out << format_double(p.frequency) << ","
        << (std::isfinite(p.value) ? format_double(p.value) : "nan") << "\n";
}

struct SimulateArgs {
  int mechanism = 0;
  int n = 0;
  std::string rho;
  double noise_scale = 1.0;
  std::uint64_t seed = 0;
  std::string out;
  double delta = 0.72;
  int timepoints = 284;
};

int run_simulate(const SimulateArgs& args, const std::vector<std::string>& argv,
                 const std::string& started) {
  MechanismConfig config;
  config.mechanism = args.mechanism == 0   ? Mechanism::m0
                     : args.mechanism == 1 ? Mechanism::m1
                                           : Mechanism::m2;
  config.n = args.n;
  config.rho = parse_double_list(args.rho, "--rho");
  config.noise_scale = args.noise_scale;
  config.seed = args.seed;
  config.grid = TimeGrid(args.delta, args.timepoints);
  config.validate();

  const SyntheticDataset dataset = generate(config);
  const std::filesystem::path out(args.out);
  save_bold_csv(dataset.panel, out);

  std::filesystem::path stimulus_path = out;
  stimulus_path.replace_extension("");
  stimulus_path += "_stimulus.csv";
  save_stimulus_csv(standard_task_intervals(), stimulus_path);

  json sidecar;
  sidecar["mechanism"] = args.mechanism;
  sidecar["n"] = config.n;
  sidecar["rho"] = config.rho;
  sidecar["noise_scale"] = config.noise_scale;
  sidecar["seed"] = config.seed;
  sidecar["delta"] = config.grid.delta();
  sidecar["num_points"] = config.grid.num_points();
  sidecar["node_labels"] = dataset.panel.node_labels();
  json betas = json::array();
  const int K = dataset.panel.num_nodes();
  if (!dataset.latent_betas.empty()) {
    for (int w = 0; w < config.n; ++w) {
      json row = json::array();
      for (int k = 0; k < K; ++k)
        row.push_back(dataset.latent_betas[static_cast<std::size_t>(w) * K + k]);
      betas.push_back(row);
    }
  }
  sidecar["latent_betas"] = betas;
  std::filesystem::path sidecar_path = out;
  sidecar_path.replace_extension(".json");
  write_json(sidecar, sidecar_path);

  emit_manifest("simulate", argv, sidecar, config.seed, {},
                started, out.string() + ".manifest.json");
  std::cout << "wrote " << out.string() << " (" << config.n << " subjects, "
            << K << " nodes)\n";
  return 0;
}

struct EstimateArgs {
  std::string method = "ptfce";
  std::string input;
  std::string stimulus;
  std::string nodes;
  bool all_pairs = false;
  std::string hrf;
  std::string band = "0,0.15";
  std::uint64_t seed = 0;
  std::string out;
  std::string curve_out;
  int threads = 0;
};

int run_estimate(const EstimateArgs& args, const std::vector<std::string>& argv,
                 const std::string& started) {
  const BoldPanel panel = load_bold_csv(args.input);
  const SampledSignal stimulus = load_stimulus_csv(args.stimulus, panel.grid());
  const FrequencyBand band = parse_band(args.band);
  const HrfSpec hrf = args.hrf.empty() ? HrfSpec::canonical() : parse_hrf(args.hrf);
  const HarnessMethod method = parse_method(args.method);

  json result;
  result["method"] = to_string(method);
  result["band"] = band_json(band);
  result["seed"] = args.seed;
  std::vector<CurvePoint> curve;

  if (args.all_pairs) {
    const int K = panel.num_nodes();
    result["labels"] = panel.node_labels();
    if (method == HarnessMethod::ptfce) {
      const std::vector<HrfSpec> hrfs(K, hrf);
      const PtfcMatrix matrix = ptfce_matrix(panel, stimulus, hrfs, band, args.seed);
      json rows = json::array();
      for (int k = 0; k < K; ++k) {
        json row = json::array();
        for (int l = 0; l < K; ++l) {
          const double v = matrix.at(k, l);
          row.push_back(std::isfinite(v) ? json(v) : json(nullptr));
        }
        rows.push_back(row);
      }
      result["matrix"] = rows;
      result["failed_pairs"] = matrix.failed_pairs;
    } else {
      json mean_rows = json::array(), median_rows = json::array();
      for (int k = 0; k < K; ++k) {
        json mean_row = json::array(), median_row = json::array();
        for (int l = 0; l < K; ++l) {
          if (k == l) {
            mean_row.push_back(1.0);
            median_row.push_back(1.0);
            continue;
          }
          const std::string& a = panel.node_labels()[std::min(k, l)];
          const std::string& b = panel.node_labels()[std::max(k, l)];
          MethodEstimate estimate = [&] {
            switch (method) {
              case HarnessMethod::naive: return naive_pearson(panel, a, b);
              case HarnessMethod::task: return task_pearson(panel, a, b, stimulus);
              case HarnessMethod::beta:
                return beta_series(panel, a, b, stimulus, hrf, hrf);
              default: return coherence_fc(panel, a, b, band);
            }
          }();
          mean_row.push_back(estimate.mean_aggregate);
          median_row.push_back(estimate.median_aggregate);
        }
        mean_rows.push_back(mean_row);
        median_rows.push_back(median_row);
      }
      result["matrix_mean"] = mean_rows;
      result["matrix_median"] = median_rows;
    }
  } else {
    std::stringstream ss(args.nodes);
    std::string node_k, node_l;
    if (!std::getline(ss, node_k, ',') || !std::getline(ss, node_l) ||
        node_k.empty() || node_l.empty())
      throw std::invalid_argument("--nodes: expected two labels K,L");
    if (node_k == node_l)
      throw std::invalid_argument("--nodes: labels must differ");
    result["node_pair"] = {node_k, node_l};

    if (method == HarnessMethod::ptfce) {
      const PtfcEstimate estimate = ptfce_estimate(
          panel, node_k, node_l, stimulus, hrf, hrf, band, args.seed);
      result["estimate"] = estimate.estimate;
      result["dropped_frequencies"] = estimate.dropped_frequencies;
      result["diagnostics"] = {
          {"non_identifiable_subjects", estimate.non_identifiable_subjects},
          {"subjects", panel.num_subjects()}};
      result["curve"] = curve_json(estimate.curve);
      curve = estimate.curve;
    } else {
      MethodEstimate estimate = [&] {
        switch (method) {
          case HarnessMethod::naive: return naive_pearson(panel, node_k, node_l);
          case HarnessMethod::task:
            return task_pearson(panel, node_k, node_l, stimulus);
          case HarnessMethod::beta:
            return beta_series(panel, node_k, node_l, stimulus, hrf, hrf);
          default:
            return coherence_fc(panel, node_k, node_l, band, {}, &curve);
        }
      }();
      result["estimate"] = estimate.mean_aggregate;
      result["mean"] = estimate.mean_aggregate;
      result["median"] = estimate.median_aggregate;
      result["excluded_subjects"] = estimate.excluded_subjects;
      result["per_subject"] = estimate.per_subject;
      if (method == HarnessMethod::coherence) result["curve"] = curve_json(curve);
    }
  }

  write_json(result, args.out);
  if (!args.curve_out.empty()) write_curve_csv(curve, args.curve_out);
  emit_manifest("estimate", argv,
                json{{"method", args.method},
                     {"nodes", args.nodes},
                     {"all_pairs", args.all_pairs},
                     {"band", args.band},
                     {"hrf", args.hrf}},
                args.seed, {args.input, args.stimulus}, started,
                args.out + ".manifest.json");
  return 0;
}

struct CompareArgs {
  std::string methods = "ptfce,naive,task,beta,coherence";
  std::string input;
  std::string stimulus;
  std::string seed_node;
  std::string band = "0,0.15";
  double threshold = 0.5;
  std::uint64_t seed = 0;
  std::string out;
};

int run_compare(const CompareArgs& args, const std::vector<std::string>& argv,
                const std::string& started) {
  const BoldPanel panel = load_bold_csv(args.input);
  const SampledSignal stimulus = load_stimulus_csv(args.stimulus, panel.grid());
  CompareOptions options;
  options.band = parse_band(args.band);
  options.threshold = args.threshold;
  options.seed_node = args.seed_node;
  const CompareReport report = compare_methods(
      panel, stimulus, parse_method_list(args.methods), args.seed, options);

  json result;
  result["pairs"] = report.pair_labels;
  result["threshold"] = args.threshold;
  result["seed"] = args.seed;
  json methods = json::array();
  for (const CompareMethodResult& m : report.methods) {
    json entry;
    entry["method"] = m.method;
    entry["aggregation"] = m.aggregation;
    entry["values"] = m.values;
    entry["standardized"] = m.standardized;
    json classified = json::array();
    for (bool c : m.classified) classified.push_back(c);
    entry["classified"] = classified;
    methods.push_back(entry);
  }
  result["methods"] = methods;
  result["excluded_methods"] = report.excluded_methods;
  const int M = static_cast<int>(report.methods.size());
  auto matrix_json = [&](const std::vector<double>& values) {
    json rows = json::array();
    for (int i = 0; i < M; ++i) {
      json row = json::array();
      for (int j = 0; j < M; ++j) {
        const double v = values[static_cast<std::size_t>(i) * M + j];
        row.push_back(std::isfinite(v) ? json(v) : json(nullptr));
      }
      rows.push_back(row);
    }
    return rows;
  };
  result["kappa"] = matrix_json(report.kappa);
  result["kappa_p"] = matrix_json(report.kappa_p);

  write_json(result, args.out);
  emit_manifest("compare", argv,
                json{{"methods", args.methods},
                     {"band", args.band},
                     {"threshold", args.threshold},
                     {"seed_node", args.seed_node}},
                args.seed, {args.input, args.stimulus}, started,
                args.out + ".manifest.json");
  return 0;
}

struct BenchArgs {
  std::string experiment;
  int mechanism = 1;
  int n = 308;
  std::string methods = "ptfce";
  std::string rhos = "0.25,0.5,0.75";
  std::string ns = "308";
  std::string lambdas = "0.5,2,5";
  double rho = 0.75;
  int reps = 200;
  std::uint64_t seed = 0;
  std::string out = ".";
  int threads = 0;
  bool oracle_references = false;
};

int run_bench(const BenchArgs& args, const std::vector<std::string>& argv,
              const std::string& started) {
  const std::filesystem::path dir(args.out);
  std::filesystem::create_directories(dir);
  json config{{"experiment", args.experiment}, {"reps", args.reps},
              {"threads", args.threads}};

  if (args.experiment == "identification") {
    if (args.mechanism != 1 && args.mechanism != 2)
      throw std::invalid_argument("bench identification: --mechanism must be 1 or 2");
    HarnessOptions options;
    options.threads = args.threads;
    options.rows_path = (dir / "identification_rows.csv").string();
    const IdentificationReport report = identification_experiment(
        args.mechanism == 1 ? Mechanism::m1 : Mechanism::m2, args.n, args.reps,
        parse_method_list(args.methods), args.seed, options);
    std::ofstream out(dir / "identification_report.csv");
    out << "method,aggregation,mechanism,n,reps,correct,failures,rate,ci_half_width\n";
    for (const IdentificationRow& row : report.rows)
      out << row.method << "," << row.aggregation << "," << args.mechanism << ","
          << args.n << "," << args.reps << "," << row.correct << ","
          << row.failures << "," << format_double(row.rate) << ","
          << format_double(row.ci_half_width) << "\n";
    config["mechanism"] = args.mechanism;
    config["n"] = args.n;
    config["methods"] = args.methods;
  } else if (args.experiment == "bias") {
    HarnessOptions options;
    options.threads = args.threads;
    options.rows_path = (dir / "bias_rows.csv").string();
    const std::vector<double> rhos = parse_double_list(args.rhos, "--rhos");
    const std::vector<int> ns = parse_int_list(args.ns, "--ns");
    const std::vector<BiasRow> table =
        bias_experiment(rhos, ns, args.reps, args.seed, options);
    std::ofstream out(dir / "bias_report.csv");
    out << "rho,n,reps,mean,sd,relative_bias\n";
    for (const BiasRow& row : table)
      out << format_double(row.rho) << "," << row.n << "," << row.reps << ","
          << format_double(row.mean) << "," << format_double(row.sd) << ","
          << format_double(row.relative_bias) << "\n";
    config["rhos"] = args.rhos;
    config["ns"] = args.ns;
  } else if (args.experiment == "noise-sweep") {
    NoiseSweepOptions options;
    options.threads = args.threads;
    options.rows_path = (dir / "noise_sweep_rows.csv").string();
    options.oracle_references = args.oracle_references;
    const std::vector<double> lambdas = parse_double_list(args.lambdas, "--lambdas");
    const std::vector<NoiseSweepRow> table =
        noise_sweep(lambdas, args.rho, args.n, args.reps, args.seed, options);
    std::ofstream out(dir / "noise_sweep_report.csv");
    out << "lambda,reps,mean\n";
    for (const NoiseSweepRow& row : table)
      out << format_double(row.lambda) << "," << row.reps << ","
          << format_double(row.mean) << "\n";
    config["lambdas"] = args.lambdas;
    config["rho"] = args.rho;
    config["n"] = args.n;
    config["oracle_references"] = args.oracle_references;
  } else {
    throw std::invalid_argument("bench: unknown experiment '" + args.experiment +
                                "' (identification|bias|noise-sweep)");
  }

  emit_manifest("bench", argv, config, args.seed, {}, started,
                (dir / (args.experiment + ".manifest.json")).string());
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  const std::string started = utc_now();
  CLI::App app{"Population-level task-evoked functional connectivity toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Generate synthetic BOLD panels");
  simulate->add_option("--mechanism", sim.mechanism, "Generator (0, 1, or 2)")
      ->required()
      ->check(CLI::Range(0, 2));
  simulate->add_option("--n", sim.n, "Number of subjects")->required();
  simulate->add_option("--rho", sim.rho, "Target correlation(s), comma separated")
      ->required();
  simulate->add_option("--noise-scale", sim.noise_scale, "Noise variance multiplier");
  simulate->add_option("--seed", sim.seed, "RNG seed")->required();
  simulate->add_option("--out", sim.out, "Output panel CSV path")->required();
  simulate->add_option("--delta", sim.delta, "Sampling step in seconds");
  simulate->add_option("--timepoints", sim.timepoints, "Number of time points");

  EstimateArgs est;
  CLI::App* estimate = app.add_subcommand("estimate", "Estimate connectivity for a node pair");
  estimate->add_option("--method", est.method,
                       "ptfce|naive|task|beta|coherence")->required();
  estimate->add_option("--input", est.input, "Panel CSV")->required();
  estimate->add_option("--stimulus", est.stimulus, "Stimulus interval CSV")->required();
  estimate->add_option("--nodes", est.nodes, "Pair of node labels K,L");
  estimate->add_flag("--all-pairs", est.all_pairs, "Estimate every node pair");
  estimate->add_option("--hrf", est.hrf, "HRF a1,a2,b1,b2,c[,latency]");
  estimate->add_option("--band", est.band, "Frequency band LO,HI in Hz");
  estimate->add_option("--seed", est.seed, "RNG seed")->required();
  estimate->add_option("--out", est.out, "Output JSON path")->required();
  estimate->add_option("--curve-out", est.curve_out, "Optional curve CSV path");
  estimate->add_option("--threads", est.threads, "Worker threads (0 = all cores)");

  CompareArgs cmp;
  CLI::App* compare = app.add_subcommand("compare", "Cross-method agreement analysis");
  compare->add_option("--methods", cmp.methods, "Comma-separated method list");
  compare->add_option("--input", cmp.input, "Panel CSV")->required();
  compare->add_option("--stimulus", cmp.stimulus, "Stimulus interval CSV")->required();
  compare->add_option("--seed-node", cmp.seed_node, "Seed node label (default: all pairs)");
  compare->add_option("--band", cmp.band, "Frequency band LO,HI in Hz");
  compare->add_option("--threshold", cmp.threshold, "Classification threshold");
  compare->add_option("--seed", cmp.seed, "RNG seed")->required();
  compare->add_option("--out", cmp.out, "Output JSON path")->required();

  BenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Monte Carlo experiments");
  bench_cmd->add_option("experiment", bench.experiment,
                        "identification|bias|noise-sweep")->required();
  bench_cmd->add_option("--mechanism", bench.mechanism, "Mechanism (1 or 2)");
  bench_cmd->add_option("--n", bench.n, "Subjects per replication");
  bench_cmd->add_option("--methods", bench.methods, "Methods for identification");
  bench_cmd->add_option("--rhos", bench.rhos, "rho list for bias");
  bench_cmd->add_option("--ns", bench.ns, "n list for bias");
  bench_cmd->add_option("--lambdas", bench.lambdas, "lambda list for noise-sweep");
  bench_cmd->add_option("--rho", bench.rho, "rho for noise-sweep");
  bench_cmd->add_option("--reps", bench.reps, "Replications")->required();
  bench_cmd->add_option("--seed", bench.seed, "RNG seed")->required();
  bench_cmd->add_option("--out", bench.out, "Output directory");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (0 = all cores)");
  bench_cmd->add_flag("--oracle-references", bench.oracle_references,
                      "Use the generator's true reference terms");

  std::vector<char*> argv_c;
  std::string program = "taskfc";
  argv_c.push_back(program.data());
  std::vector<std::string> args_copy(args);
  for (std::string& a : args_copy) argv_c.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv_c.size()), argv_c.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim, args, started);
    if (estimate->parsed()) return run_estimate(est, args, started);
    if (compare->parsed()) return run_compare(cmp, args, started);
    if (bench_cmd->parsed()) return run_bench(bench, args, started);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CompletenessError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace taskfc
