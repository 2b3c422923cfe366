#pragma once

#include <stdexcept>

namespace taskfc {

// A frequency band that contains no usable grid frequency.
class EmptyBandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input whose second-order statistics are singular (e.g. identical channels).
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An estimator that could not produce any usable value.
class EstimationFailedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A rank-deficient regression design.
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cohen's kappa with expected agreement of one.
class UndefinedKappaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file contents.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A panel file missing a (subject, node) combination.
class CompletenessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace taskfc
