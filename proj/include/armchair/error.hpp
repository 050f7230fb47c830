#ifndef ARMCHAIR_ERROR_HPP
#define ARMCHAIR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace armchair {

/// Malformed user input (bad potential, bad config field, out-of-range index).
class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not certify its result.
class numeric_failure : public std::runtime_error {
 public:
  explicit numeric_failure(const std::string& what, int k = -1, int n = -1)
      : std::runtime_error(what), k_(k), n_(n) {}

  int k() const noexcept { return k_; }
  int n() const noexcept { return n_; }

 private:
  int k_;
  int n_;
};

}  // namespace armchair

#endif  // ARMCHAIR_ERROR_HPP
