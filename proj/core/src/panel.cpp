#include "taskfc/panel.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace taskfc {

BoldPanel::BoldPanel(TimeGrid grid, std::vector<std::string> node_labels,
                     std::vector<std::string> subject_ids,
                     std::vector<double> data)
    : grid_(grid),
      node_labels_(std::move(node_labels)),
      subject_ids_(std::move(subject_ids)),
      data_(std::move(data)) {
  if (subject_ids_.size() < 2)
    throw std::invalid_argument("BoldPanel: need at least two subjects");
  if (node_labels_.size() < 2)
    throw std::invalid_argument("BoldPanel: need at least two nodes");
  std::unordered_set<std::string> seen;
  for (const auto& label : node_labels_)
    if (!seen.insert(label).second)
      throw std::invalid_argument("BoldPanel: duplicate node label '" + label + "'");
  const std::size_t expected =
      subject_ids_.size() * node_labels_.size() * grid_.num_points();
  if (data_.size() != expected)
    throw std::invalid_argument("BoldPanel: data size does not match dimensions");
  for (double v : data_)
    if (!std::isfinite(v))
      throw std::invalid_argument("BoldPanel: values must be finite");
}

int BoldPanel::node_index(const std::string& label) const {
  for (std::size_t i = 0; i < node_labels_.size(); ++i)
    if (node_labels_[i] == label) return static_cast<int>(i);
  throw std::invalid_argument("BoldPanel: unknown node '" + label + "'");
}

std::span<const double> BoldPanel::series(int subject, int node) const {
  const std::size_t stride = grid_.num_points();
  const std::size_t offset =
      (static_cast<std::size_t>(subject) * node_labels_.size() + node) * stride;
  return {data_.data() + offset, stride};
}

SampledSignal BoldPanel::signal(int subject, int node) const {
  const auto s = series(subject, node);
  return SampledSignal(grid_, std::vector<double>(s.begin(), s.end()));
}

BoldPanel BoldPanel::rescaled_node(const std::string& label, double scale,
                                   double offset) const {
  const int node = node_index(label);
  std::vector<double> data(data_);
  const std::size_t stride = grid_.num_points();
  for (std::size_t subject = 0; subject < subject_ids_.size(); ++subject) {
    const std::size_t base =
        (subject * node_labels_.size() + node) * stride;
    for (std::size_t t = 0; t < stride; ++t)
      data[base + t] = scale * data[base + t] + offset;
  }
  return BoldPanel(grid_, node_labels_, subject_ids_, std::move(data));
}

}  // namespace taskfc
