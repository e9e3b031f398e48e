#include "classthresh/csv.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "classthresh/errors.hpp"
#include "classthresh/estimation.hpp"

namespace classthresh {

namespace {

// Parses RFC-4180 text: fields separated by commas, optionally quoted;
// quoted fields may contain commas, newlines and doubled quotes.
CsvTable parse_csv(const std::string& text, const std::string& path) {
  CsvTable table;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;
  std::size_t line = 1;

  auto end_field = [&]() {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&]() {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    row_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        in_quotes = true;
        row_started = true;
        break;
      case ',':
        end_field();
        row_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_started || !field.empty() || !row.empty()) end_row();
        ++line;
        break;
      default:
        field.push_back(ch);
        row_started = true;
        break;
    }
  }
  if (in_quotes) {
    throw IoError(path + ": unterminated quoted field at line " +
                  std::to_string(line));
  }
  if (row_started || !field.empty() || !row.empty()) end_row();

  if (rows.empty()) throw IoError(path + ": empty file");
  table.header = rows.front();
  table.rows.assign(rows.begin() + 1, rows.end());
  return table;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return parse_csv(buf.str(), path);
}

namespace {

std::size_t find_column(const CsvTable& table, const std::string& name,
                        const std::string& path) {
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) {
    throw ValidationError(path + ": no column named '" + name + "'");
  }
  return static_cast<std::size_t>(it - table.header.begin());
}

double parse_number(const std::string& text, const std::string& context,
                    std::vector<std::string>& errors) {
  const char* s = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0') {
    if (errors.size() < 5) {
      errors.push_back(context + ": not a number: '" + text + "'");
    } else if (errors.size() == 5) {
      errors.push_back("...");
    }
    return 0.0;
  }
  return v;
}

std::uint8_t parse_outcome(const std::string& text, const std::string& context,
                           std::vector<std::string>& errors) {
  if (text == "0" || text == "false" || text == "no") return 0;
  if (text == "1" || text == "true" || text == "yes") return 1;
  if (errors.size() < 5) {
    errors.push_back(context + ": not a binary outcome: '" + text + "'");
  } else if (errors.size() == 5) {
    errors.push_back("...");
  }
  return 0;
}

}  // namespace

IngestResult ingest(const IngestSpec& spec) {
  if (spec.inputs.empty()) throw ValidationError("ingest: no input files");
  if (spec.x_col.empty() || spec.z_col.empty()) {
    throw ValidationError("ingest: x and z columns are required");
  }

  IngestResult result;
  std::vector<double> xs;
  std::vector<std::string> zs_raw;
  std::vector<double> zs_num;
  std::vector<std::uint8_t> ys;
  std::vector<std::string> errors;
  const bool continuous_z = spec.dichotomize_q.has_value();

  std::vector<std::string> first_header;
  for (const auto& path : spec.inputs) {
    const CsvTable table = read_csv(path);
    if (first_header.empty()) {
      first_header = table.header;
    } else if (table.header != first_header) {
      throw ValidationError(path + ": header differs from first input");
    }
    const std::size_t xi = find_column(table, spec.x_col, path);
    const std::size_t zi = find_column(table, spec.z_col, path);
    std::optional<std::size_t> yi;
    if (spec.y_col.has_value()) yi = find_column(table, *spec.y_col, path);
    std::vector<std::size_t> drop_idx;
    for (const auto& col : spec.drop_nonpositive) {
      drop_idx.push_back(find_column(table, col, path));
    }

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      // Header is line 1; data row r is line r+2 for single-line records.
      const std::string where = path + " row " + std::to_string(r + 2);
      if (row.size() != table.header.size()) {
        if (errors.size() < 5) {
          errors.push_back(where + ": has " + std::to_string(row.size()) +
                           " fields, header has " +
                           std::to_string(table.header.size()));
        }
        continue;
      }
      ++result.rows_read;
      bool drop = false;
      for (const std::size_t di : drop_idx) {
        if (parse_number(row[di], where, errors) <= 0.0) drop = true;
      }
      if (drop) {
        ++result.rows_dropped;
        continue;
      }
      xs.push_back(parse_number(row[xi], where, errors));
      if (continuous_z) {
        zs_num.push_back(parse_number(row[zi], where, errors));
      } else {
        zs_raw.push_back(row[zi]);
      }
      if (yi.has_value()) {
        ys.push_back(parse_outcome(row[*yi], where, errors));
      }
    }
  }

  if (!errors.empty()) {
    std::string msg = "ingest failed:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw IoError(msg);
  }
  if (xs.empty()) throw DataError("ingest: no usable rows after filtering");

  if (spec.cusum_window.has_value()) {
    const std::size_t h = *spec.cusum_window;
    const std::size_t m = xs.size() / h;  // cusum_transform validates h
    std::vector<double> xw = cusum_transform(xs, h);
    std::vector<std::string> zr;
    std::vector<double> zn;
    std::vector<std::uint8_t> yw;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t end = i * h + h - 1;  // window end carries z and y
      if (continuous_z) {
        zn.push_back(zs_num[end]);
      } else {
        zr.push_back(zs_raw[end]);
      }
      if (!ys.empty()) yw.push_back(ys[end]);
    }
    xs = std::move(xw);
    zs_raw = std::move(zr);
    zs_num = std::move(zn);
    ys = std::move(yw);
  }

  LabeledSample& sample = result.sample;
  sample.x = std::move(xs);
  sample.y = std::move(ys);

  if (continuous_z) {
    const DichotomizeResult split =
        dichotomize_top_quantile(zs_num, *spec.dichotomize_q);
    result.dichotomize_threshold = split.threshold;
    sample.labels = {"high", "low"};
    sample.z.resize(split.high.size());
    for (std::size_t i = 0; i < split.high.size(); ++i) {
      sample.z[i] = split.high[i] ? 0u : 1u;
    }
  } else {
    std::vector<std::string> labels;
    if (spec.labels.has_value()) {
      labels = *spec.labels;
    } else {
      for (const auto& z : zs_raw) {
        if (std::find(labels.begin(), labels.end(), z) == labels.end()) {
          labels.push_back(z);
        }
      }
    }
    sample.labels = labels;
    sample.z.resize(zs_raw.size());
    for (std::size_t i = 0; i < zs_raw.size(); ++i) {
      const auto it = std::find(labels.begin(), labels.end(), zs_raw[i]);
      if (it == labels.end()) {
        throw ValidationError("ingest: label '" + zs_raw[i] +
                              "' not in the declared label set");
      }
      sample.z[i] = static_cast<std::uint32_t>(it - labels.begin());
    }
  }
  sample.validate();
  return result;
}

}  // namespace classthresh
