#pragma once

#include <stdexcept>
#include <string>

namespace rangeview {

/// Raised when input data (files, point clouds, statistics) is malformed or
/// cannot support the requested computation. Precondition violations on
/// arguments use std::invalid_argument / std::out_of_range instead.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rangeview
