#pragma once

#include <stdexcept>
#include <string>

namespace ggmlab {

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidSpectrumError : std::domain_error {
  using std::domain_error::domain_error;
};

struct PurityError : std::domain_error {
  using std::domain_error::domain_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Photon subtraction annihilated every stored amplitude; the post-selected
// state is undefined on zero norm.
struct EmptyResultError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ggmlab
