#pragma once

#include <stdexcept>
#include <string>

namespace sevc {

// Malformed, truncated or otherwise undecodable input data.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing, malformed or unusable key material.
class KeyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sevc
