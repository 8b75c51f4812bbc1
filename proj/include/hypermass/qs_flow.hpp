#pragma once

// Quasi-spherical flow along the normal foliation:
//   2 H0 du/drho = 2 u^2 lap_rho u + (u - u^3)(R^rho + 6 k^2),  u(0) = H0 / H.
// The integrated variable is v = u - 1 so that the late-time approach to 1 is
// resolved to full relative precision.

#include <memory>
#include <optional>
#include <vector>

#include "hypermass/foliation.hpp"
#include "hypermass/parallel.hpp"
#include "hypermass/surface.hpp"

namespace hypermass {

struct QSState {
  double rho = 0.0;
  ScalarField u;
  FoliationLeaf leaf;
  std::shared_ptr<const EmbeddedSurface> base;
};

enum class TimeScheme { euler, heun };

struct FlowControls {
  double rho_max = 8.0;
  double cfl = 0.4;
  double sample_every = 0.05;
  TimeScheme scheme = TimeScheme::heun;
  double max_step = 0.0;  // <= 0 selects 1e-3 / kappa
  std::optional<double> alpha_override;
  bool leaf_bounds = true;       // evaluate foliation bounds at each sample
  double bounds_tol = 1e-8;
  double max_principle_tol = 1e-8;
};

/// H0 / H; throws DomainError when H or H0 is not positive.
ScalarField initial_u(const EmbeddedSurface& s, const BoundaryData& bd);

QSState initial_state(std::shared_ptr<const EmbeddedSurface> s, ScalarField u0);

/// One forward-Euler step on the current leaf followed by advancing the leaf.
/// Throws NumericalError("stability violated; reduce cfl") if u <= 0 after the step.
QSState step_u(const QSState& state, double d_rho);

/// cfl * min(2 H0) * (min metric spacing)^2 / (2 max u^2), capped at max_step.
double stable_step(const FoliationLeaf& leaf, const ScalarField& u, double cfl, double max_step);

struct FlowSample {
  double rho = 0.0;
  ScalarField v;  // u - 1
  double min_u = 1.0;
  double max_u = 1.0;
  LorentzVec mass;  // with the frozen weight alpha
  std::optional<LeafBoundsReport> bounds;

  double u(std::size_t i) const { return 1.0 + v[i]; }
  ScalarField u_field() const;
};

struct FlowResult {
  std::shared_ptr<const EmbeddedSurface> surface;
  RadiiAlpha radii;
  double alpha = 1.0;
  FlowControls controls;
  std::vector<FlowSample> samples;
  std::size_t steps = 0;
  double min_step = 0.0;
  double u0_min = 1.0;
  double u0_max = 1.0;
  bool max_principle_ok = true;
  double max_principle_violation = 0.0;  // largest excursion outside the bracket
};

/// Integrates from rho = 0 to ctl.rho_max, landing exactly on the sample grid
/// n * sample_every (plus rho_max).  Throws NumericalError with the rho of
/// failure on loss of positivity or non-finite values.
FlowResult run_flow(std::shared_ptr<const EmbeddedSurface> s, const BoundaryData& bd, const FlowControls& ctl,
                    WorkerPool* pool = nullptr);

}  // namespace hypermass
