#include "taskfc/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "taskfc/errors.hpp"

namespace taskfc {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& text, const std::string& context) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ParseError("non-numeric value '" + text + "' at " + context);
  return value;
}

std::string read_line_or_throw(std::ifstream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(std::string(what) + ": unexpected end of file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

BoldPanel load_bold_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path.string() + "'");

  std::string line = read_line_or_throw(in, "panel header");
  double delta = 0.0;
  if (line.rfind("# delta=", 0) == 0) {
    delta = parse_double(line.substr(8), path.string() + " delta line");
    line = read_line_or_throw(in, "panel header");
  } else {
    throw ParseError(path.string() + ": missing '# delta=<seconds>' line");
  }
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "subject" || header[1] != "node")
    throw ParseError(path.string() + ": expected header subject,node,t0,...");
  const int len = static_cast<int>(header.size()) - 2;

  std::vector<std::string> subjects, nodes;
  struct Row {
    std::string subject, node;
    std::vector<double> values;
  };
  std::vector<Row> rows;
  int line_number = 2;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != len + 2)
      throw ParseError(path.string() + ":" + std::to_string(line_number) +
                       ": expected " + std::to_string(len + 2) + " fields, got " +
                       std::to_string(fields.size()));
    Row row{fields[0], fields[1], {}};
    row.values.reserve(len);
    for (int t = 0; t < len; ++t)
      row.values.push_back(
          parse_double(fields[t + 2], path.string() + ":" +
                                          std::to_string(line_number) +
                                          " column " + std::to_string(t + 3)));
    rows.push_back(std::move(row));
  }

  for (const Row& row : rows) {
    if (std::find(subjects.begin(), subjects.end(), row.subject) == subjects.end())
      subjects.push_back(row.subject);
    if (std::find(nodes.begin(), nodes.end(), row.node) == nodes.end())
      nodes.push_back(row.node);
  }

  const TimeGrid grid(delta, len);
  std::vector<double> data(subjects.size() * nodes.size() * len);
  std::vector<char> filled(subjects.size() * nodes.size(), 0);
  for (const Row& row : rows) {
    const auto si = std::find(subjects.begin(), subjects.end(), row.subject) -
                    subjects.begin();
    const auto ni = std::find(nodes.begin(), nodes.end(), row.node) - nodes.begin();
    const std::size_t cell = si * nodes.size() + ni;
    if (filled[cell])
      throw ParseError(path.string() + ": duplicate row for (" + row.subject +
                       ", " + row.node + ")");
    filled[cell] = 1;
    std::copy(row.values.begin(), row.values.end(),
              data.begin() + static_cast<std::ptrdiff_t>(cell) * len);
  }
  for (std::size_t si = 0; si < subjects.size(); ++si)
    for (std::size_t ni = 0; ni < nodes.size(); ++ni)
      if (!filled[si * nodes.size() + ni])
        throw CompletenessError(path.string() + ": missing row for (" +
                                subjects[si] + ", " + nodes[ni] + ")");

  return BoldPanel(grid, std::move(nodes), std::move(subjects), std::move(data));
}

void save_bold_csv(const BoldPanel& panel, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path.string() + "'");
  out << "# delta=" << format_double(panel.grid().delta()) << "\n";
  out << "subject,node";
  for (int t = 0; t < panel.grid().num_points(); ++t) out << ",t" << t;
  out << "\n";
  for (int w = 0; w < panel.num_subjects(); ++w) {
    for (int k = 0; k < panel.num_nodes(); ++k) {
      out << panel.subject_ids()[w] << "," << panel.node_labels()[k];
      for (double v : panel.series(w, k)) out << "," << format_double(v);
      out << "\n";
    }
  }
}

std::vector<Interval> load_stimulus_intervals(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path.string() + "'");
  std::vector<Interval> intervals;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line_number == 1 && line.rfind("start", 0) == 0) continue;  // header
    const auto fields = split_csv_line(line);
    if (fields.size() != 2)
      throw ParseError(path.string() + ":" + std::to_string(line_number) +
                       ": expected start_seconds,end_seconds");
    intervals.push_back(
        {parse_double(fields[0], path.string() + ":" + std::to_string(line_number)),
         parse_double(fields[1], path.string() + ":" + std::to_string(line_number))});
  }
  return intervals;
}

SampledSignal load_stimulus_csv(const std::filesystem::path& path,
                                const TimeGrid& grid) {
  return boxcar_stimulus(load_stimulus_intervals(path), grid);
}

void save_stimulus_csv(std::span<const Interval> intervals,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path.string() + "'");
  out << "start_seconds,end_seconds\n";
  for (const Interval& iv : intervals)
    out << format_double(iv.start) << "," << format_double(iv.end) << "\n";
}

std::string fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path.string() + "'");
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char buffer[4096];
  while (in.read(buffer, sizeof buffer) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ull;
    }
    if (!in) break;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016" PRIx64, hash);
  return out;
}

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["argv"] = manifest.argv;
  j["config"] = manifest.config_json.empty()
                    ? nlohmann::json::object()
                    : nlohmann::json::parse(manifest.config_json);
  j["seed"] = manifest.seed;
  j["version"] = manifest.version;
  j["inputs"] = nlohmann::json::array();
  for (const ManifestInput& input : manifest.inputs)
    j["inputs"].push_back({{"path", input.path}, {"digest", input.digest}});
  j["started_at"] = manifest.started_at;
  j["finished_at"] = manifest.finished_at;
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

}  // namespace taskfc
