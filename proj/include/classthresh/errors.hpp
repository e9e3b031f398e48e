#pragma once

#include <stdexcept>
#include <string>

namespace classthresh {

// Bad parameters, malformed configs, violated type invariants. CLI exit 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested level cannot be held for the given class probabilities, or an
// LP has no feasible point. CLI exit 3.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The data cannot support the requested estimate (empty class, zero scale,
// too few rows). CLI exit 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File access or parse failure. CLI exit 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace classthresh
