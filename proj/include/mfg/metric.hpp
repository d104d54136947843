#pragma once

#include "mfg/grid.hpp"

namespace mfg {

// SPD metric M = I + c (-Laplacian_h) on the u-slot, periodic constant
// coefficients. Solving an M-system costs one orthogonal transform per axis
// against the precomputed eigenbasis of the 1D periodic second-difference
// stencil; constants are eigenvectors with eigenvalue 1, so constant fields
// pass through both multiply and solve unchanged.
class USlotMetric {
 public:
  USlotMetric() = default;
  USlotMetric(const TorusGrid& grid, double c);

  bool active() const { return c_ > 0.0; }
  double scale() const { return c_; }

  // M f via the stencil, O(nodes).
  ScalarField multiply(const ScalarField& f) const;

  // M^{-1} rhs via per-axis eigen transforms.
  ScalarField solve(const ScalarField& rhs) const;

 private:
  void transform_axis(std::vector<double>& v, bool inverse) const;

  double c_ = 0.0;
  TorusGrid grid_;
  std::vector<double> basis_;        // n x n, column k = eigenvector k
  std::vector<double> eigenvalues_;  // per axis index, 4 sin^2(pi k / n) / h^2
};

}  // namespace mfg
