#include "specpert/quadrature.hpp"

namespace specpert {

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
    throw ValidationError("quadrature tolerances must be positive");
  if (max_subdivisions < 1) throw ValidationError("quadrature max_subdivisions must be at least 1");
  if (!(singularity_delta > 0.0)) throw ValidationError("quadrature singularity_delta must be positive");
}

QuadratureSpec QuadratureSpec::tightened(double factor) const {
  QuadratureSpec q = *this;
  q.abs_tol *= factor;
  q.rel_tol *= factor;
  return q;
}

std::vector<double> breakpoints_within(double lo, double hi, std::vector<double> interior) {
  std::vector<double> pts;
  pts.reserve(interior.size() + 2);
  pts.push_back(lo);
  for (double p : interior)
    if (p > lo && p < hi) pts.push_back(p);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace specpert
