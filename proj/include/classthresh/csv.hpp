#pragma once

#include <optional>
#include <string>
#include <vector>

#include "classthresh/sample.hpp"

namespace classthresh {

// RFC-4180-style table: quoted fields, embedded separators/newlines, CRLF.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);

struct IngestSpec {
  std::vector<std::string> inputs;
  std::string x_col;
  std::string z_col;
  std::optional<std::string> y_col;
  // Rows with a value <= 0 in any of these numeric columns are dropped.
  std::vector<std::string> drop_nonpositive;
  // Present: z is continuous and split at its top-q quantile into high/low.
  std::optional<double> dichotomize_q;
  // Class universe for categorical z; defaults to first-appearance order.
  std::optional<std::vector<std::string>> labels;
  // Non-overlapping window sums x <- sum/sqrt(h); z and y are taken at each
  // window end. Applied after dropping and before dichotomization.
  std::optional<std::size_t> cusum_window;
};

struct IngestResult {
  LabeledSample sample;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
  std::optional<double> dichotomize_threshold;
};

IngestResult ingest(const IngestSpec& spec);

}  // namespace classthresh
