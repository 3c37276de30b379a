#pragma once

#include <stdexcept>
#include <string>

namespace asyncopt {

/// Invalid configuration or input data (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Step-size window-sum condition violated (CLI exit code 3).
struct AdmissibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Internal invariant broken at run time (CLI exit code 4).
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace asyncopt
