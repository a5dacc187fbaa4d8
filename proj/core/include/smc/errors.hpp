#pragma once

#include <stdexcept>
#include <string>

namespace smc {

// base class for everything this library throws on purpose
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// precondition violations: bad arguments, invalid states, non-physical inputs
struct InvalidInput : Error {
  using Error::Error;
};

// runtime numerical failures: integrator blow-up, CFL violation, mass leakage,
// non-convergent iterations
struct NumericsError : Error {
  using Error::Error;
};

// config-file / override problems, carries location info for diagnostics
struct ConfigError : Error {
  int line = 0;          // 1-based line in the config text, 0 if not applicable
  std::string key;       // offending key, may be empty

  explicit ConfigError(const std::string& msg, int line_ = 0, std::string key_ = {})
      : Error(msg), line(line_), key(std::move(key_)) {}
};

}  // namespace smc
