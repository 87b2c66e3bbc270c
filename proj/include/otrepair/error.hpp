#pragma once

#include <stdexcept>
#include <string>

namespace otrepair {

// Error categories map onto CLI exit codes: Config -> 2, Data/Io -> 3,
// Numerical -> 4.
enum class ErrorKind { Config, Data, Numerical, Io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }

  int exit_code() const noexcept {
    switch (kind_) {
      case ErrorKind::Config: return 2;
      case ErrorKind::Data: return 3;
      case ErrorKind::Io: return 3;
      case ErrorKind::Numerical: return 4;
    }
    return 1;
  }

 private:
  ErrorKind kind_;
  std::string code_;
};

}  // namespace otrepair
