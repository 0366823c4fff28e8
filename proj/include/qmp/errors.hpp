#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qmp {

// Argument outside the mathematical domain of an operation (Im z <= 0, y <= 0, df <= 2, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Shape mismatch, e.g. a structure predicate applied to an odd-dimensional matrix.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input fails a documented precondition (e.g. not Type-III within tolerance).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvertibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical accuracy contract was breached (eigensolver did not converge,
// trace identity violated, non-Hermitian input to a Hermitian routine).
class ContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<std::string> fields)
      : std::invalid_argument(join(fields)), fields_(std::move(fields)) {}

  const std::vector<std::string>& fields() const noexcept { return fields_; }

 private:
  static std::string join(const std::vector<std::string>& fields) {
    std::string msg = "invalid configuration:";
    for (const auto& f : fields) msg += " [" + f + "]";
    return msg;
  }

  std::vector<std::string> fields_;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace qmp
