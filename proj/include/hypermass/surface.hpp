#pragma once

// Convex radial-graph surfaces in the hyperboloid model: construction,
// fundamental forms, curvature, hypothesis checks, and the radii/weight
// constants of the positivity estimate.

#include <optional>
#include <string>
#include <vector>

#include "hypermass/harmonics.hpp"
#include "hypermass/lorentz.hpp"
#include "hypermass/sphere_grid.hpp"

namespace hypermass {

struct HarmonicTerm {
  int l = 0;
  int m = 0;
  double epsilon = 0.0;
};

/// Radial function r(theta, psi) about o.  Harmonic mode is the relative
/// perturbation r = R0 (1 + sum eps Y_lm); table mode gives r per node.
struct RadialSpec {
  enum class Mode { round, harmonic, table };

  double kappa = 1.0;
  Mode mode = Mode::round;
  double R0 = 1.0;
  std::vector<HarmonicTerm> terms;
  std::vector<double> table;

  static RadialSpec round(double kappa, double R0);
  static RadialSpec harmonic(double kappa, double R0, std::vector<HarmonicTerm> terms);
  static RadialSpec from_table(double kappa, std::vector<double> r);
};

struct EmbeddedSurface {
  SphereGrid grid;
  double kappa;
  VecField X;     // position on the hyperboloid
  VecField N;     // outward unit normal, tangent to the hyperboloid
  MetricField g;  // first fundamental form
  MetricField h;  // second fundamental form, h_ab = -<d_a d_b X, N>
  ScalarField H0; // mean curvature, tr(g^{-1} h)
  ScalarField K;  // Gauss curvature, -kappa^2 + det h / det g
  ScalarField r;  // geodesic distance of each node from o
};

struct BoundaryData {
  ScalarField H;  // prescribed mean curvature from the filling
};

/// Principal curvatures (eigenvalues of g^{-1} h) at node i, ascending.
std::pair<double, double> principal_curvatures(const MetricField& g, const MetricField& h, std::size_t i);

EmbeddedSurface build_surface(const RadialSpec& spec, const SphereGrid& grid);

/// Radial values r at every node (no geometry).
std::vector<double> radial_values(const RadialSpec& spec, const SphereGrid& grid);

struct ConditionResult {
  std::string name;
  bool pass = true;
  double margin = 0.0;  // worst value of the tested quantity (e.g. min(K + kappa^2))
  int worst_j = -1;
  int worst_k = -1;
};

struct HypothesisReport {
  std::vector<ConditionResult> conditions;
  bool all_pass() const;
  /// First failing condition, or nullptr.
  const ConditionResult* first_failure() const;
  const ConditionResult& get(const std::string& name) const;
};

/// Checks K > -kappa^2, convexity (h positive definite), H > 0 and H0 > 0.
HypothesisReport validate_hypotheses(const EmbeddedSurface& s, const BoundaryData& bd);

struct RadiiAlpha {
  double R1;     // inscribed radius about o (min of r)
  double R2;     // circumscribed radius about o (max of r)
  double alpha;  // coth(k R1) + mu
  double mu;     // (1/sinh k R1) sqrt(sinh^2 k R2 / sinh^2 k R1 - 1)
};

RadiiAlpha radii_and_alpha(const EmbeddedSurface& s);
RadiiAlpha alpha_from_radii(double R1, double R2, double kappa);

/// Geometry after an ambient isometry: X and N are transformed; intrinsic
/// and extrinsic forms are unchanged; r is recomputed about the new o.
EmbeddedSurface recenter(const EmbeddedSurface& s, const LorentzBoost& boost);

}  // namespace hypermass
