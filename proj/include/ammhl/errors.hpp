#pragma once

#include <stdexcept>
#include <string>

namespace ammhl {

// Every failure the library reports is one of these. Sweeps catch them and
// skip the offending point; the CLI maps them onto exit codes.
enum class ErrorKind {
  domain,         // argument outside the mathematical domain
  insufficient,   // trade larger than the pool can serve
  capability,     // (signal, solver) combination not supported
  precondition,   // model assumption violated (e.g. c >= sqrt(2 eta phi))
  convergence,    // numerical method did not reach tolerance
  consistency,    // internal cross-check failed
  shape,          // mismatched grids / path counts
  config,         // malformed configuration
  io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool ok, ErrorKind kind, const char* what) {
  if (!ok) fail(kind, what);
}

}  // namespace ammhl
