#pragma once

#include <stdexcept>

namespace rvol {

// A file could not be opened, read or written.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input data violates the expected format or a series invariant.
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rvol
