#pragma once
#include <stdexcept>
#include <string>

namespace cbm {

// Error taxonomy mapped to CLI exit codes:
//   ValueError / StateError -> 2 (bad configuration or arguments)
//   DataError               -> 3 (unreadable or malformed input files)
//   CapacityError           -> 4 (request exceeds an enumeration bound)
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValueError : Error {
  using Error::Error;
};

struct StateError : Error {
  using Error::Error;
};

struct DataError : Error {
  using Error::Error;
};

struct CapacityError : Error {
  using Error::Error;
};

}  // namespace cbm
