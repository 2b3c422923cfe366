#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "taskfc/hrf.hpp"
#include "taskfc/panel.hpp"
#include "taskfc/signal.hpp"

namespace taskfc {

enum class Mechanism { m0, m1, m2 };

/// Configuration for the synthetic BOLD generators. `rho` holds one target
/// correlation for m0 and two (pairs (1,2) and (2,3)) for m1/m2;
/// `noise_scale` multiplies the white-noise variance.
struct MechanismConfig {
  Mechanism mechanism = Mechanism::m0;
  int n = 2;
  std::vector<double> rho;
  double noise_scale = 1.0;
  std::uint64_t seed = 0;
  TimeGrid grid = TimeGrid(0.72, 284);

  void validate() const;
  int num_nodes() const { return mechanism == Mechanism::m0 ? 2 : 3; }
};

/// Generated panel plus the latent coefficient draws that produced it
/// (empty for m2, which has no subject coefficients).
struct SyntheticDataset {
  BoldPanel panel;
  std::vector<double> latent_betas;  // n x K row-major
  MechanismConfig config;
};

/// The task stimulus and the four non-overlapping nuisance stimuli of the
/// reference block design (two 12 s blocks each).
struct StandardStimuli {
  SampledSignal task;
  std::vector<SampledSignal> nuisance;
};

StandardStimuli standard_stimuli(const TimeGrid& grid);

/// Interval lists behind standard_stimuli, for file emission.
std::vector<Interval> standard_task_intervals();
std::vector<std::vector<Interval>> standard_nuisance_intervals();

/// Per-node generating HRFs: nodes 1 and 3 share one non-canonical shape,
/// node 2 uses another.
HrfSpec mechanism_hrf(int node_index);

/// Plain (unnormalized) circular convolution of stimulus and HRF, the scale
/// at which generated task components enter the BOLD traces.
SampledSignal generation_regressor(const SampledSignal& stimulus,
                                   const HrfSpec& hrf);

/// The coefficient draws of the generator's first step only (n x K,
/// row-major), without materializing any signals.
std::vector<double> draw_mechanism_betas(const MechanismConfig& config);

SyntheticDataset generate_mechanism0(const MechanismConfig& config);
SyntheticDataset generate_mechanism1(const MechanismConfig& config);
SyntheticDataset generate_mechanism2(const MechanismConfig& config);
SyntheticDataset generate(const MechanismConfig& config);

}  // namespace taskfc
