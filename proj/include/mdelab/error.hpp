#pragma once

#include <stdexcept>
#include <string>

namespace mdelab {

// Bad input: malformed files, violated preconditions. CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what, std::string field = {})
      : std::invalid_argument(what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// The computation itself failed: lattice box overflow, support bound
// violated, LP infeasible or cycling. CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mdelab
