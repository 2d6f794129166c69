#pragma once

#include <stdexcept>
#include <string>

namespace panelclust {

/// Raised for every contract violation: malformed input, invalid parameters,
/// inconsistent structures. The message names the offending item.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace panelclust
