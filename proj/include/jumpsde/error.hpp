#pragma once

#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace jumpsde {

/// Violated operation precondition (bad argument, wrong structure, bound not respected).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A mathematical object is undefined for the requested arguments.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature or root finding did not reach its tolerance.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too many non-finite paths in a Monte Carlo run.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline std::function<void(const std::string&)>& warning_sink() {
  static std::function<void(const std::string&)> sink = [](const std::string& msg) {
    std::cerr << "jumpsde warning: " << msg << '\n';
  };
  return sink;
}
}  // namespace detail

inline void set_warning_sink(std::function<void(const std::string&)> sink) {
  detail::warning_sink() = std::move(sink);
}

inline void warn(const std::string& msg) {
  if (detail::warning_sink()) detail::warning_sink()(msg);
}

inline void require(bool condition, const std::string& msg) {
  if (!condition) throw PreconditionError(msg);
}

}  // namespace jumpsde
