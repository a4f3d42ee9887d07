#include "kcsr/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "kcsr/errors.hpp"

namespace kcsr {

int MultiSequence::total_length() const {
  return std::accumulate(lengths.begin(), lengths.end(), 0);
}

DataSequence MultiSequence::concatenated() const {
  DataSequence out;
  if (blocks.empty()) return out;
  const int d = blocks.front().dim();
  out.samples.resize(d, total_length());
  bool all_labeled = true;
  for (const DataSequence& b : blocks) all_labeled = all_labeled && b.has_labels();
  int at = 0;
  for (const DataSequence& b : blocks) {
    out.samples.middleCols(at, b.length()) = b.samples;
    if (all_labeled) {
      out.truth_labels.insert(out.truth_labels.end(), b.truth_labels.begin(),
                              b.truth_labels.end());
    }
    at += b.length();
  }
  out.name = "concat";
  return out;
}

DataSequence generate_circles(const std::vector<int>& counts, const std::vector<double>& radii,
                              double noise_sd, std::uint64_t seed) {
  if (counts.size() != radii.size() || counts.empty()) {
    throw InputError("generate_circles: counts and radii must have equal non-zero length");
  }
  for (int c : counts) {
    if (c < 1) throw InputError("generate_circles: counts must be >= 1");
  }
  if (noise_sd < 0.0) throw InputError("generate_circles: noise_sd must be non-negative");

  const int n = std::accumulate(counts.begin(), counts.end(), 0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::normal_distribution<double> noise(0.0, 1.0);

  DataSequence X;
  X.samples.resize(2, n);
  X.truth_labels.reserve(n);
  X.name = "circles";
  int j = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (int t = 0; t < counts[c]; ++t, ++j) {
      const double a = angle(rng);
      const double r = radii[c] + (noise_sd > 0.0 ? noise_sd * noise(rng) : 0.0);
      X.samples(0, j) = r * std::cos(a);
      X.samples(1, j) = r * std::sin(a);
      X.truth_labels.push_back(static_cast<int>(c) + 1);
    }
  }
  return X;
}

DataSequence generate_gaussian_segments(const std::vector<int>& lengths, double mean_step,
                                        double noise_sd, std::uint64_t seed, int dim) {
  if (lengths.empty()) throw InputError("generate_gaussian_segments: lengths must be non-empty");
  for (int l : lengths) {
    if (l < 1) throw InputError("generate_gaussian_segments: lengths must be >= 1");
  }
  if (dim < 1) throw InputError("generate_gaussian_segments: dim must be >= 1");

  const int n = std::accumulate(lengths.begin(), lengths.end(), 0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  DataSequence X;
  X.samples.resize(dim, n);
  X.truth_labels.reserve(n);
  X.name = "gaussian_segments";
  int j = 0;
  for (std::size_t p = 0; p < lengths.size(); ++p) {
    const double mean = static_cast<double>(p) * mean_step;
    for (int t = 0; t < lengths[p]; ++t, ++j) {
      for (int a = 0; a < dim; ++a) {
        X.samples(a, j) = (a == 0 ? mean : 0.0) + noise_sd * noise(rng);
      }
      X.truth_labels.push_back(static_cast<int>(p) + 1);
    }
  }
  return X;
}

namespace {

std::vector<std::string> split_row(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delim)) cells.push_back(cell);
  if (!line.empty() && line.back() == delim) cells.push_back("");
  return cells;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InputError("csv row " + std::to_string(row) + " column " + std::to_string(col + 1) +
                     ": '" + s + "' is not numeric");
  }
  return v;
}

}  // namespace

DataSequence read_csv_sequence(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open csv file: " + path);

  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_row(line, options.delimiter);
    if (options.has_header && header.empty() && rows.empty()) {
      for (const std::string& h : cells) header.push_back(trim(h));
      width = cells.size();
      continue;
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw InputError("csv row " + std::to_string(lineno) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(width));
    }
    std::vector<double> vals(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) vals[c] = parse_cell(cells[c], lineno, c);
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw InputError("csv file has no data rows: " + path);

  // Resolve an optional label column: integer index (negative from the end)
  // or a header name.
  int label_col = -1;
  bool has_label = false;
  if (options.label_column.has_value()) {
    const std::string& sel = *options.label_column;
    int idx = 0;
    const auto [ptr, ec] = std::from_chars(sel.data(), sel.data() + sel.size(), idx);
    if (ec == std::errc{} && ptr == sel.data() + sel.size()) {
      if (idx < 0) idx += static_cast<int>(width);
      if (idx < 0 || idx >= static_cast<int>(width)) {
        throw InputError("label column index out of range: " + sel);
      }
      label_col = idx;
    } else {
      if (header.empty()) throw InputError("label column by name requires a header row");
      for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == sel) {
          label_col = static_cast<int>(c);
          break;
        }
      }
      if (label_col < 0) throw InputError("label column '" + sel + "' not found in header");
    }
    has_label = true;
  }

  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(width) - (has_label ? 1 : 0);
  if (d < 1) throw InputError("csv has no feature columns after removing the label column");

  DataSequence X;
  X.samples.resize(d, n);
  X.name = path;
  if (has_label) X.truth_labels.reserve(n);
  for (int j = 0; j < n; ++j) {
    int at = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (has_label && static_cast<int>(c) == label_col) {
        const double v = rows[j][c];
        if (std::abs(v - std::round(v)) > 1e-9) {
          throw InputError("csv row " + std::to_string(j + 1) +
                           ": label value must be an integer");
        }
        X.truth_labels.push_back(static_cast<int>(std::llround(v)));
      } else {
        X.samples(at++, j) = rows[j][c];
      }
    }
  }
  return X;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_csv_sequence(const DataSequence& X, const std::string& path, bool include_labels) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open csv file for writing: " + path);
  const bool labels = include_labels && X.has_labels();
  for (int j = 0; j < X.length(); ++j) {
    for (int a = 0; a < X.dim(); ++a) {
      if (a) out << ',';
      out << format_double(X.samples(a, j));
    }
    if (labels) out << ',' << X.truth_labels[j];
    out << '\n';
  }
  if (!out) throw InputError("i/o failure while writing " + path);
}

MultiSequence concat_sequences(const std::vector<DataSequence>& blocks) {
  if (blocks.empty()) throw InputError("concat_sequences: no blocks");
  const int d = blocks.front().dim();
  MultiSequence ms;
  bool any_labeled = false;
  bool all_labeled = true;
  for (const DataSequence& b : blocks) {
    if (b.dim() != d) {
      throw InputError("concat_sequences: feature dimension mismatch (" + std::to_string(d) +
                       " vs " + std::to_string(b.dim()) + ")");
    }
    if (b.length() < 1) throw InputError("concat_sequences: empty block");
    any_labeled = any_labeled || b.has_labels();
    all_labeled = all_labeled && b.has_labels();
    ms.lengths.push_back(b.length());
  }
  ms.blocks = blocks;
  ms.labels_dropped = any_labeled && !all_labeled;
  return ms;
}

void write_result_json(const SegmentationResult& result, const std::string& path) {
  nlohmann::json j;
  j["method"] = result.method;
  j["k"] = result.k;
  j["alpha"] = result.alpha;
  j["lambda"] = result.lambda;
  j["kernel"] = {{"kind", result.kernel.kind == KernelKind::rbf ? "rbf" : "linear"},
                 {"sigma", result.kernel.sigma}};
  j["betas"] = std::vector<double>(result.betas.begin(), result.betas.end());
  j["tau"] = std::vector<double>(result.tau.begin(), result.tau.end());
  j["labels"] = result.labels;
  j["boundaries"] = result.boundaries;
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& [it, val] : result.objective_trace) {
    trace.push_back(nlohmann::json::array({it, val}));
  }
  j["objective_trace"] = std::move(trace);
  if (result.seed.has_value()) {
    j["seed"] = *result.seed;
  } else {
    j["seed"] = nullptr;
  }
  if (result.block_lengths.has_value()) {
    j["block_lengths"] = *result.block_lengths;
  } else {
    j["block_lengths"] = nullptr;
  }

  std::ofstream out(path);
  if (!out) throw InputError("cannot open output file: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw InputError("i/o failure while writing " + path);
}

SegmentationResult read_result_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open result file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed result json in " + path + ": " + e.what());
  }

  SegmentationResult r;
  try {
    r.method = j.at("method").get<std::string>();
    r.k = j.at("k").get<int>();
    r.alpha = j.at("alpha").get<double>();
    r.lambda = j.at("lambda").get<double>();
    const std::string kind = j.at("kernel").at("kind").get<std::string>();
    if (kind == "rbf") {
      r.kernel.kind = KernelKind::rbf;
    } else if (kind == "linear") {
      r.kernel.kind = KernelKind::linear;
    } else {
      throw InputError("unknown kernel kind: " + kind);
    }
    r.kernel.sigma = j.at("kernel").at("sigma").get<double>();
    const auto betas = j.at("betas").get<std::vector<double>>();
    r.betas = Eigen::Map<const Eigen::VectorXd>(betas.data(), betas.size());
    const auto tau = j.at("tau").get<std::vector<double>>();
    r.tau = Eigen::Map<const Eigen::VectorXd>(tau.data(), tau.size());
    r.labels = j.at("labels").get<std::vector<int>>();
    r.boundaries = j.at("boundaries").get<std::vector<int>>();
    for (const auto& pair : j.at("objective_trace")) {
      r.objective_trace.emplace_back(pair.at(0).get<int>(), pair.at(1).get<double>());
    }
    if (!j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("block_lengths").is_null()) {
      r.block_lengths = j.at("block_lengths").get<std::vector<int>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError("result json missing fields in " + path + ": " + e.what());
  }
  return r;
}

}  // namespace kcsr
