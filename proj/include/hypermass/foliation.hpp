#pragma once

// Normal geodesic foliation outside a convex surface:
//   X(rho) = cosh(k rho) X0 + sinh(k rho)/k N0,  N(rho) = k sinh(k rho) X0 + cosh(k rho) N0.
// Leaves are evaluated in closed form, never stepped.

#include <array>

#include "hypermass/surface.hpp"

namespace hypermass {

struct FoliationLeaf {
  double rho = 0.0;
  double kappa = 1.0;
  SphereGrid grid{8, 16};
  VecField X;
  VecField N;
  MetricField g;
  MetricField h;
  ScalarField H0;
  ScalarField K;
  ScalarField Rrho;  // scalar curvature of the leaf metric, 2 det(g^{-1}h) - 2 k^2
  ScalarField r;
  ScalarField dr_drho;
  std::array<ScalarField, 3> dphi_drho;
};

/// q = h g^{-1} h per node.
MetricField shape_square(const MetricField& g, const MetricField& h);

/// Throws DomainError for rho < 0.
FoliationLeaf leaf_at(const EmbeddedSurface& s, double rho);

struct LeafBoundsReport {
  double radial_margin = 0.0;   // min of dr/drho - sinh(k R1)/sinh(k R2)
  double angular_margin = 0.0;  // min over nodes and y of RHS - LHS of the phi-rate bound
  double mu_margin = 0.0;       // min of mu k dr/drho - |dphi/drho|
  double tol = 1e-8;
  bool pass() const { return radial_margin >= -tol && angular_margin >= -tol && mu_margin >= -tol; }
};

/// Pointwise bounds on the polar rates of the foliation.  The angular bound is
/// tested for `n_directions` sampled unit y plus the per-node extremal one.
LeafBoundsReport check_leaf_bounds(const FoliationLeaf& leaf, double R1, double R2, double mu, double tol = 1e-8,
                                   int n_directions = 26);

struct PositionResidual {
  std::array<ScalarField, 4> component;  // H0 N + lap X - 2 k^2 X, per Minkowski component
  std::array<double, 4> max_component{};
  double max = 0.0;
};

/// Residual of H0 dX/drho + lap X - 2 k^2 X = 0 with the leaf Laplacian.
PositionResidual position_identity_residual(const FoliationLeaf& leaf);

}  // namespace hypermass
