#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace classthresh {

// Screening records: measurement x, class index z into labels, optional
// binary outcome y (empty when no outcome column was ingested). labels is the
// declared class universe and fixes the class order everywhere downstream.
struct LabeledSample {
  std::vector<double> x;
  std::vector<std::uint32_t> z;
  std::vector<std::uint8_t> y;
  std::vector<std::string> labels;

  std::size_t size() const { return x.size(); }
  bool has_outcomes() const { return !y.empty(); }
  void validate() const;  // throws ValidationError
};

}  // namespace classthresh
