#pragma once

#include <stdexcept>
#include <string>

namespace parageo {

// Raised for misconfiguration: bad parameters, malformed input files,
// unusable charts. The command line tool maps this to exit code 2,
// as opposed to a numerical check failing (exit code 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace parageo
