#pragma once

#include <stdexcept>
#include <string>

namespace eisenlab {

struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

// Raised when a denominator in a closed form vanishes; factor names the culprit.
struct pole_error : std::runtime_error {
  std::string factor;
  explicit pole_error(const std::string& f)
      : std::runtime_error("pole in " + f), factor(f) {}
};

struct accuracy_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace eisenlab
