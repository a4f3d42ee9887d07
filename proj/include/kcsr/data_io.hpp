#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kcsr/segmenter.hpp"
#include "kcsr/types.hpp"

namespace kcsr {

// 2D points on concentric circles, one contiguous label run per circle.
// counts[c] samples at radius radii[c] + N(0, noise_sd), angles uniform.
DataSequence generate_circles(const std::vector<int>& counts, const std::vector<double>& radii,
                              double noise_sd, std::uint64_t seed);

// Mean-shift sequence: segment p has lengths[p] samples at mean p*mean_step
// (first axis) plus N(0, noise_sd) per coordinate. Labels attached.
DataSequence generate_gaussian_segments(const std::vector<int>& lengths, double mean_step,
                                        double noise_sd, std::uint64_t seed, int dim = 1);

struct CsvOptions {
  char delimiter = ',';
  bool has_header = false;
  // Column holding integer truth labels: a header name, or an integer index
  // (0-based; negative counts from the end, "-1" is the last column).
  std::optional<std::string> label_column;
};

// Rows are time-ordered samples, columns are features; dot-decimal parsing
// only. Errors carry the offending row/column.
DataSequence read_csv_sequence(const std::string& path, const CsvOptions& options = {});

void write_csv_sequence(const DataSequence& X, const std::string& path,
                        bool include_labels = true);

// Order-preserving concatenation; feature dimensions must agree. Labels are
// kept only when every block carries them (labels_dropped flags a mix).
MultiSequence concat_sequences(const std::vector<DataSequence>& blocks);

void write_result_json(const SegmentationResult& result, const std::string& path);
SegmentationResult read_result_json(const std::string& path);

}  // namespace kcsr
