#pragma once

#include <cstddef>
#include <vector>

namespace tcsde {

enum class PathKind { generic, subordinator, inverse_clock, brownian };

// A scalar path sampled on the uniform grid t0 + k*dt, k = 0..size()-1.
// Values are stored by index; time_at(k) reconstructs the abscissa, so a
// path never stores its grid twice.
struct GridPath {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;
  PathKind kind = PathKind::generic;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double front() const { return values.front(); }
  double back() const { return values.back(); }
  double last_time() const {
    return empty() ? t0 : time_at(values.size() - 1);
  }
};

// Throws ParameterError unless the path starts at 0 and is strictly
// increasing (a subordinator path).
void require_strictly_increasing_from_zero(const GridPath& path);

// Throws ParameterError unless the path is nondecreasing (an inverse clock
// or any valid integrator clock).
void require_nondecreasing(const GridPath& path);

}  // namespace tcsde
