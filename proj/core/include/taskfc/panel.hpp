#pragma once

#include <span>
#include <string>
#include <vector>

#include "taskfc/signal.hpp"

namespace taskfc {

/// n subjects x K nodes x (T+1) time points of BOLD observations.
/// Node labels are unique, every value is finite, and the layout is
/// row-major [subject][node][time].
class BoldPanel {
 public:
  BoldPanel(TimeGrid grid, std::vector<std::string> node_labels,
            std::vector<std::string> subject_ids, std::vector<double> data);

  const TimeGrid& grid() const { return grid_; }
  int num_subjects() const { return static_cast<int>(subject_ids_.size()); }
  int num_nodes() const { return static_cast<int>(node_labels_.size()); }
  const std::vector<std::string>& node_labels() const { return node_labels_; }
  const std::vector<std::string>& subject_ids() const { return subject_ids_; }
  const std::vector<double>& data() const { return data_; }

  int node_index(const std::string& label) const;

  std::span<const double> series(int subject, int node) const;
  SampledSignal signal(int subject, int node) const;

  /// Same panel with values[subject][node] mapped to scale * v + offset.
  BoldPanel rescaled_node(const std::string& label, double scale,
                          double offset) const;

 private:
  TimeGrid grid_;
  std::vector<std::string> node_labels_;
  std::vector<std::string> subject_ids_;
  std::vector<double> data_;
};

}  // namespace taskfc
