#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qmem {

// Precondition violations on numeric inputs (out-of-range reflectivity,
// non-finite phase, empty sequence, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// File access and parse failures. `line()` is 1-based, 0 when not applicable.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : what + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline void require(bool ok, const char* msg) {
  if (!ok) throw DomainError(msg);
}

}  // namespace detail
}  // namespace qmem
