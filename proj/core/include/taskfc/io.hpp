#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "taskfc/panel.hpp"
#include "taskfc/signal.hpp"

namespace taskfc {

/// Wide panel CSV: a `# delta=<seconds>` line, a `subject,node,t0,...,tT`
/// header, then one row per (subject, node). Values are written with full
/// round-trip precision, so save/load is bit-exact.
BoldPanel load_bold_csv(const std::filesystem::path& path);
void save_bold_csv(const BoldPanel& panel, const std::filesystem::path& path);

/// Stimulus CSV: `start_seconds,end_seconds` rows (header optional, order
/// free). Loading samples the boxcar on the given grid.
SampledSignal load_stimulus_csv(const std::filesystem::path& path,
                                const TimeGrid& grid);
std::vector<Interval> load_stimulus_intervals(const std::filesystem::path& path);
void save_stimulus_csv(std::span<const Interval> intervals,
                       const std::filesystem::path& path);

/// Everything needed to reproduce a run: command, full configuration JSON,
/// seed, tool version, and input-file digests.
struct ManifestInput {
  std::string path;
  std::string digest;  // fnv1a-64, hex
};

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string config_json;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<ManifestInput> inputs;
  std::string started_at;
  std::string finished_at;
};

std::string fnv1a64_file(const std::filesystem::path& path);
void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path);

/// Round-trip-exact decimal rendering of a double.
std::string format_double(double value);

}  // namespace taskfc
