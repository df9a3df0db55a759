#pragma once

#include <stdexcept>
#include <string>

namespace malcev {

  // Raised for malformed input: bad tables, out-of-range indices, shape
  // mismatches. The CLI maps this to exit code 2.
  class ValidationError : public std::invalid_argument {
   public:
    explicit ValidationError(std::string const& what)
        : std::invalid_argument(what) {}
  };

  // Raised when a configured resource guard would be exceeded.
  class ResourceLimitError : public std::runtime_error {
   public:
    explicit ResourceLimitError(std::string const& what)
        : std::runtime_error(what) {}
  };

}  // namespace malcev
