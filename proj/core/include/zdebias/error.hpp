#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zdebias {

/// Malformed record, unknown label, bad probabilities. Carries the
/// 1-based line number when raised during file reading (0 otherwise).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, std::size_t line_no = 0)
      : std::runtime_error(line_no == 0
                               ? what
                               : "line " + std::to_string(line_no) + ": " + what),
        line_no_(line_no) {}

  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

/// Invalid or inconsistent configuration (bad bucket edges, missing
/// predictor, id collisions between seed and input, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zdebias
