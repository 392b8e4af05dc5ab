#pragma once

#include <stdexcept>
#include <string>

namespace ee {

// Status values double as CLI exit codes.
enum class Status { ok = 0, usage = 1, config = 2, runtime = 3 };

class Error : public std::runtime_error {
public:
  Error(Status s, const std::string& msg) : std::runtime_error(msg), status_(s) {}
  Status status() const { return status_; }

private:
  Status status_;
};

struct UsageError : Error {
  explicit UsageError(const std::string& msg) : Error(Status::usage, msg) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(Status::config, msg) {}
};

struct RuntimeError : Error {
  explicit RuntimeError(const std::string& msg) : Error(Status::runtime, msg) {}
};

// Corrupt or incompatible files.
struct FormatError : RuntimeError {
  explicit FormatError(const std::string& msg) : RuntimeError(msg) {}
};

// Inputs outside a function's mathematical domain (zero-norm rows,
// off-support parameters, non-nested priors, ...).
struct DomainError : RuntimeError {
  explicit DomainError(const std::string& msg) : RuntimeError(msg) {}
};

}  // namespace ee
