#pragma once

// Discretisation parameters (n, eps, T, variant) and the grid maps
// eta(t) = floor(t n / T) T / n and rho(t) = floor(t n / T).

#include <cmath>
#include <string>
#include <string_view>

#include "jumpsde/error.hpp"

namespace jumpsde {

enum class Variant { with_substitute, without_substitute, euler_peano };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::with_substitute: return "with_substitute";
    case Variant::without_substitute: return "without_substitute";
    case Variant::euler_peano: return "euler_peano";
  }
  return "unknown";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "with_substitute") return Variant::with_substitute;
  if (s == "without_substitute") return Variant::without_substitute;
  if (s == "euler_peano") return Variant::euler_peano;
  throw PreconditionError("unknown scheme variant '" + std::string(s) + "'");
}

struct SchemeConfig {
  int n = 1;
  double eps = 0.0;
  double T = 1.0;
  Variant variant = Variant::with_substitute;

  void validate() const {
    require(n >= 1, "SchemeConfig: n must be >= 1");
    require(eps >= 0.0 && std::isfinite(eps), "SchemeConfig: eps must be finite and >= 0");
    require(T > 0.0 && std::isfinite(T), "SchemeConfig: T must be positive");
  }

  double step() const { return T / n; }

  /// Grid time t_i = i T / n, exact at i = n.
  double time(int i) const { return i == n ? T : static_cast<double>(i) * T / n; }

  /// rho(t) = max{i : t_i <= t}, robust to rounding of t n / T.
  int rho(double t) const {
    int k = static_cast<int>(std::floor(t * n / T));
    if (k < 0) k = 0;
    if (k > n) k = n;
    while (k < n && time(k + 1) <= t) ++k;
    while (k > 0 && time(k) > t) --k;
    return k;
  }

  double eta(double t) const { return time(rho(t)); }

  /// Index i of the step (t_{i-1}, t_i] containing t in (0, T].
  int step_of(double t) const {
    const int k = rho(t);
    const int i = time(k) == t ? k : k + 1;
    return i < 1 ? 1 : (i > n ? n : i);
  }
};

}  // namespace jumpsde
