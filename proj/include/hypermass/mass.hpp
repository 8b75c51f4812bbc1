#pragma once

// Quasi-local mass vector m(rho) = int (H0 - H0/u) (x1, x2, x3, alpha t) dSigma_rho,
// its pairings, monotonicity and derivative audits, and the interior
// functional f(p) = int (H0 - H) cosh(k r(p, y)) dSigma_0(y).

#include <string>
#include <vector>

#include "hypermass/foliation.hpp"
#include "hypermass/qs_flow.hpp"
#include "hypermass/surface.hpp"

namespace hypermass {

struct MassVector {
  LorentzVec vec;
  double rho = 0.0;
  double alpha_used = 1.0;
};

/// Throws DomainError when u is not positive.
MassVector mass_vector(const FoliationLeaf& leaf, const ScalarField& u, double alpha);

/// Same integral from v = u - 1, which keeps full precision as u -> 1.
MassVector mass_vector_from_excess(const FoliationLeaf& leaf, const ScalarField& v, double alpha);

/// <m, zeta>; throws DomainError unless zeta is future-directed causal.
double mass_pairing(const MassVector& m, const LorentzVec& zeta);

/// Largest pairing over a set of directions.
double worst_pairing(const LorentzVec& m, const std::vector<LorentzVec>& zetas);

struct SeriesViolation {
  std::size_t direction = 0;  // index into the zeta list
  std::size_t sample = 0;     // sample index where the decrease ends
  double decrease = 0.0;      // positive amount lost (0 when monotone)
};

struct MonotonicityReport {
  std::vector<double> rho;
  std::vector<MassVector> mass;
  double eps_rel = 1e-6;
  bool pairings_monotone = true;
  SeriesViolation worst_pairing_drop;  // normalized by |m(0).zeta|
  bool norm_monotone = true;
  double worst_norm_drop = 0.0;  // normalized by |<m(0), m(0)>|
  bool causal_ok = true;
  std::vector<std::string> causal_class;
  // pointwise integrand of d/drho (m . zeta) for the (W - W0) pairing
  double min_pointwise_integrand = 0.0;
  bool pointwise_ok = true;
  bool pass() const { return pairings_monotone && norm_monotone && causal_ok && pointwise_ok; }
};

/// Mass series at the samples of a flow with weight alpha, and the audits of
/// nondecrease for each zeta, of <m, m>, of the causal character, and of the
/// pointwise sign of the (W - W0) derivative integrand.
MonotonicityReport monotonicity_series(const FlowResult& flow, double alpha, const std::vector<LorentzVec>& zetas,
                                       double eps_rel = 1e-6, double pointwise_tol = 1e-10);

/// -int u^{-1} (u - 1)^2 [ (R + 2k^2)/2 <W, zeta> + H0 <dW/drho, zeta> ] dSigma_rho
/// with W = (x1, x2, x3, alpha t) and dW/drho = (N1, N2, N3, alpha N_t).
double analytic_pairing_derivative(const FoliationLeaf& leaf, const ScalarField& u, double alpha,
                                   const LorentzVec& zeta);

/// Minimum over nodes and unit y of the pointwise integrand above for
/// zeta = (y, 1).
double min_pointwise_integrand(const FoliationLeaf& leaf, const ScalarField& u, double alpha);

struct DerivativeReport {
  std::vector<double> rho;            // interior samples
  std::vector<double> finite_diff;    // centered difference of m . zeta
  std::vector<double> analytic;
  double max_abs_mismatch = 0.0;
  double max_rel_mismatch = 0.0;      // max |fd - an| / max |an|
};

/// Throws DomainError when the flow has fewer than 3 samples.
DerivativeReport derivative_consistency(const FlowResult& flow, double alpha, const LorentzVec& zeta);

/// Polar sub-grid about o: the centre plus shells r_i = i dr (i = 1..n_shells)
/// over an angular grid.
struct InteriorField {
  double kappa = 1.0;
  double dr = 0.0;
  int n_shells = 0;
  SphereGrid angular{8, 16};
  std::vector<HyperboloidPoint> points;  // centre first, then shell-major
  std::vector<double> f;

  double f_center() const { return f.front(); }
  double f_at(int shell, std::size_t node) const {
    return f[1 + static_cast<std::size_t>(shell - 1) * angular.size() + node];
  }
};

/// f at each point; throws DomainError naming the first point with r(p) >= R1.
std::vector<double> f_values(const EmbeddedSurface& s, const BoundaryData& bd,
                             const std::vector<HyperboloidPoint>& points);

/// Evaluates f on the polar sub-grid with spacing dr.
InteriorField f_functional(const EmbeddedSurface& s, const BoundaryData& bd, double dr, int n_shells,
                           const SphereGrid& angular);

struct FIdentityReport {
  double laplacian_rel_residual = 0.0;  // max |lap f - 3k^2 f| / max |3k^2 f|
  double gradient_norm_at_o = 0.0;
  bool critical_at_o = false;
  double critical_integrals[3] = {0.0, 0.0, 0.0};
  double max_f = 0.0;
  int max_shell = 0;
  bool max_on_boundary = false;
};

/// Throws DomainError when the sub-grid has fewer than 3 shells.
FIdentityReport f_identity_checks(const InteriorField& field, const EmbeddedSurface& s, const BoundaryData& bd,
                                  double gradient_threshold = 1e-6);

/// int (H0 - H) sinh(k r(p, y)) phi_i(y) dSigma_0, with (r, phi) polar about p.
std::array<double, 3> critical_integrals(const EmbeddedSurface& s, const BoundaryData& bd, const HyperboloidPoint& p);

struct CriticalPoint {
  HyperboloidPoint point;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Newton iteration on f over the spatial chart, from o.
CriticalPoint locate_critical_point(const EmbeddedSurface& s, const BoundaryData& bd, int max_iter = 30,
                                    double tol = 1e-10);

/// f(p) = -k^2 <p, M> with M = int (H0 - H) X dSigma_0.
LorentzVec f_moment(const EmbeddedSurface& s, const BoundaryData& bd);

}  // namespace hypermass
