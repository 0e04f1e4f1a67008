#pragma once

#include <stdexcept>
#include <string>

namespace msabn {

// Missing or unreadable input files.
class IngestionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Data that was read but violates a domain invariant.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Non-finite values reaching a loss or metric.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace msabn
