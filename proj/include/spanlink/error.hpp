#pragma once

#include <stdexcept>
#include <string>

namespace spanlink {

// Every library error carries a short machine-readable code ("config",
// "dataset", ...) so the CLI can print one parseable line and exit.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error("config", m) {}
};

struct DatasetError : Error {
  explicit DatasetError(const std::string& m) : Error("dataset", m) {}
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& m) : Error("shape", m) {}
};

struct RangeError : Error {
  explicit RangeError(const std::string& m) : Error("range", m) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& m) : Error("numeric", m) {}
};

// Raised when a requested backend (e.g. a pretrained encoder) is not present.
struct CapabilityError : Error {
  explicit CapabilityError(const std::string& m) : Error("capability", m) {}
};

}  // namespace spanlink
