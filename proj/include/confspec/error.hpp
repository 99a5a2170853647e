#pragma once

#include <stdexcept>
#include <string>

namespace confspec {

enum class ErrorKind {
  InvalidInput,  // malformed files, bad parameters, invalid meshes
  Numerical,     // solver failures, indefinite pencils, non-convergence
  Io,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void throwInput(const std::string& msg) { throw Error(ErrorKind::InvalidInput, msg); }
[[noreturn]] inline void throwNumerical(const std::string& msg) { throw Error(ErrorKind::Numerical, msg); }

} // namespace confspec
