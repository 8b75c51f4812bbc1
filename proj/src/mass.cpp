#include "hypermass/mass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hypermass/error.hpp"

namespace hypermass {

namespace {

LorentzVec weighted_moment(const VecField& X, std::span<const double> density, std::span<const double> w) {
  LorentzVec m;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double a = density[i] * w[i];
    m.x1 += a * X[i].x1;
    m.x2 += a * X[i].x2;
    m.x3 += a * X[i].x3;
    m.t += a * X[i].t;
  }
  return m;
}

double spatial_norm(const LorentzVec& v) { return std::sqrt(v.x1 * v.x1 + v.x2 * v.x2 + v.x3 * v.x3); }

}  // namespace

MassVector mass_vector_from_excess(const FoliationLeaf& leaf, const ScalarField& v, double alpha) {
  const std::size_t n = leaf.grid.size();
  if (v.size() != n) throw DomainError("u field size does not match leaf grid");
  std::vector<double> dens(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = 1.0 + v[i];
    if (!(u > 0.0)) throw DomainError("mass_vector requires u > 0");
    dens[i] = leaf.H0[i] * v[i] / u;  // H0 - H0/u
  }
  LorentzVec m = weighted_moment(leaf.X, dens, area_weights(leaf.g, leaf.grid));
  m.t *= alpha;
  return {m, leaf.rho, alpha};
}

MassVector mass_vector(const FoliationLeaf& leaf, const ScalarField& u, double alpha) {
  ScalarField v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) throw DomainError("mass_vector requires u > 0");
    v[i] = u[i] - 1.0;
  }
  return mass_vector_from_excess(leaf, v, alpha);
}

double mass_pairing(const MassVector& m, const LorentzVec& zeta) {
  if (!is_future_causal(classify(zeta, 1e-12))) {
    throw DomainError("mass pairing requires a future-directed null or timelike direction");
  }
  return inner(m.vec, zeta);
}

double worst_pairing(const LorentzVec& m, const std::vector<LorentzVec>& zetas) {
  double w = -std::numeric_limits<double>::infinity();
  for (const auto& z : zetas) w = std::max(w, inner(m, z));
  return w;
}

double analytic_pairing_derivative(const FoliationLeaf& leaf, const ScalarField& u, double alpha,
                                   const LorentzVec& zeta) {
  const std::size_t n = leaf.grid.size();
  const double k2 = leaf.kappa * leaf.kappa;
  const auto w = area_weights(leaf.g, leaf.grid);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = u[i];
    const double e = ui - 1.0;
    const LorentzVec& X = leaf.X[i];
    const LorentzVec& N = leaf.N[i];
    const LorentzVec W{X.x1, X.x2, X.x3, alpha * X.t};
    const LorentzVec dW{N.x1, N.x2, N.x3, alpha * N.t};
    const double bracket = 0.5 * (leaf.Rrho[i] + 2.0 * k2) * inner(W, zeta) + leaf.H0[i] * inner(dW, zeta);
    sum += -(e * e / ui) * bracket * w[i];
  }
  return sum;
}

double min_pointwise_integrand(const FoliationLeaf& leaf, const ScalarField& u, double alpha) {
  const double k2 = leaf.kappa * leaf.kappa;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < leaf.grid.size(); ++i) {
    const double e = u[i] - 1.0;
    const double a = 0.5 * (leaf.Rrho[i] + 2.0 * k2);
    const double b = leaf.H0[i];
    const LorentzVec V = a * leaf.X[i] + b * leaf.N[i];
    // The worst unit y is parallel to the spatial part of V.
    const double worst = spatial_norm(V) - alpha * V.t;
    lo = std::min(lo, -(e * e / u[i]) * worst);
  }
  return lo;
}

MonotonicityReport monotonicity_series(const FlowResult& flow, double alpha, const std::vector<LorentzVec>& zetas,
                                       double eps_rel, double pointwise_tol) {
  MonotonicityReport rep;
  rep.eps_rel = eps_rel;
  rep.min_pointwise_integrand = std::numeric_limits<double>::infinity();
  for (const auto& smp : flow.samples) {
    const FoliationLeaf leaf = leaf_at(*flow.surface, smp.rho);
    rep.rho.push_back(smp.rho);
    rep.mass.push_back(mass_vector_from_excess(leaf, smp.v, alpha));
    rep.min_pointwise_integrand = std::min(rep.min_pointwise_integrand, min_pointwise_integrand(leaf, smp.u_field(), alpha));
  }
  rep.pointwise_ok = rep.min_pointwise_integrand >= -pointwise_tol;

  const std::size_t ns = rep.mass.size();
  for (std::size_t z = 0; z < zetas.size(); ++z) {
    const double p0 = inner(rep.mass.front().vec, zetas[z]);
    const double scale = std::abs(p0);
    double running = p0;
    for (std::size_t k = 1; k < ns; ++k) {
      const double p = inner(rep.mass[k].vec, zetas[z]);
      const double drop = running - p;
      if (drop > eps_rel * scale) rep.pairings_monotone = false;
      const double rel = scale > 0.0 ? drop / scale : drop;
      if (rel > rep.worst_pairing_drop.decrease) rep.worst_pairing_drop = {z, k, rel};
      running = std::max(running, p);
    }
  }

  const double q0 = inner(rep.mass.front().vec, rep.mass.front().vec);
  const double qscale = std::abs(q0);
  double running = q0;
  for (std::size_t k = 1; k < ns; ++k) {
    const double q = inner(rep.mass[k].vec, rep.mass[k].vec);
    const double drop = running - q;
    if (drop > eps_rel * qscale) rep.norm_monotone = false;
    rep.worst_norm_drop = std::max(rep.worst_norm_drop, qscale > 0.0 ? drop / qscale : drop);
    running = std::max(running, q);
  }

  for (const auto& m : rep.mass) {
    const double tol = eps_rel * std::max(1.0, std::abs(rep.mass.front().vec.t));
    CausalClass c = classify(m.vec, tol);
    if (c != CausalClass::zero && std::abs(inner(m.vec, m.vec)) <= eps_rel * euclidean_norm_sq(m.vec)) {
      c = m.vec.t > 0.0 ? CausalClass::future_null : CausalClass::past_null;
    }
    rep.causal_class.emplace_back(to_string(c));
    if (!(c == CausalClass::zero || is_future_causal(c))) rep.causal_ok = false;
  }
  return rep;
}

DerivativeReport derivative_consistency(const FlowResult& flow, double alpha, const LorentzVec& zeta) {
  const auto& S = flow.samples;
  if (S.size() < 3) throw DomainError("derivative consistency needs at least 3 samples");
  std::vector<double> p(S.size());
  for (std::size_t k = 0; k < S.size(); ++k) {
    p[k] = inner(mass_vector_from_excess(leaf_at(*flow.surface, S[k].rho), S[k].v, alpha).vec, zeta);
  }
  DerivativeReport rep;
  double max_an = 0.0;
  for (std::size_t k = 1; k + 1 < S.size(); ++k) {
    const double hm = S[k].rho - S[k - 1].rho, hp = S[k + 1].rho - S[k].rho;
    const double fd = (hm * hm * p[k + 1] - hp * hp * p[k - 1] + (hp * hp - hm * hm) * p[k]) / (hm * hp * (hm + hp));
    const double an = analytic_pairing_derivative(leaf_at(*flow.surface, S[k].rho), S[k].u_field(), alpha, zeta);
    rep.rho.push_back(S[k].rho);
    rep.finite_diff.push_back(fd);
    rep.analytic.push_back(an);
    rep.max_abs_mismatch = std::max(rep.max_abs_mismatch, std::abs(fd - an));
    max_an = std::max(max_an, std::abs(an));
  }
  rep.max_rel_mismatch = max_an > 0.0 ? rep.max_abs_mismatch / max_an : rep.max_abs_mismatch;
  return rep;
}

LorentzVec f_moment(const EmbeddedSurface& s, const BoundaryData& bd) {
  if (bd.H.size() != s.grid.size()) throw DomainError("boundary mean curvature field size does not match grid");
  std::vector<double> dens(s.grid.size());
  for (std::size_t i = 0; i < dens.size(); ++i) dens[i] = s.H0[i] - bd.H[i];
  return weighted_moment(s.X, dens, area_weights(s.g, s.grid));
}

namespace {

// f without the interior check; cosh(k d(p, y)) = -k^2 <p, X(y)>.
double f_unchecked(const EmbeddedSurface& s, std::span<const double> dens, std::span<const double> w,
                   const LorentzVec& p) {
  const double k2 = s.kappa * s.kappa;
  double sum = 0.0;
  for (std::size_t i = 0; i < dens.size(); ++i) {
    const double ch = std::max(1.0, -k2 * inner(p, s.X[i]));
    sum += dens[i] * ch * w[i];
  }
  return sum;
}

}  // namespace

std::vector<double> f_values(const EmbeddedSurface& s, const BoundaryData& bd,
                             const std::vector<HyperboloidPoint>& points) {
  if (bd.H.size() != s.grid.size()) throw DomainError("boundary mean curvature field size does not match grid");
  const double R1 = radii_and_alpha(s).R1;
  std::vector<double> dens(s.grid.size());
  for (std::size_t i = 0; i < dens.size(); ++i) dens[i] = s.H0[i] - bd.H[i];
  const auto w = area_weights(s.g, s.grid);
  std::vector<double> out;
  out.reserve(points.size());
  for (std::size_t n = 0; n < points.size(); ++n) {
    const auto& p = points[n];
    if (p.kappa != s.kappa) throw GeometryError("incompatible curvature scales");
    const double r = to_polar(p).r;
    if (!(r < R1)) {
      std::ostringstream os;
      os << "interior point " << n << " (" << p.vec.x1 << ", " << p.vec.x2 << ", " << p.vec.x3 << ", " << p.vec.t
         << ") is outside D: r = " << r << " >= R1 = " << R1;
      throw DomainError(os.str());
    }
    out.push_back(f_unchecked(s, dens, w, p.vec));
  }
  return out;
}

InteriorField f_functional(const EmbeddedSurface& s, const BoundaryData& bd, double dr, int n_shells,
                           const SphereGrid& angular) {
  if (!(dr > 0.0) || n_shells < 1) throw DomainError("interior sub-grid needs dr > 0 and at least one shell");
  InteriorField F;
  F.kappa = s.kappa;
  F.dr = dr;
  F.n_shells = n_shells;
  F.angular = angular;
  F.points.push_back(base_point(s.kappa));
  for (int i = 1; i <= n_shells; ++i)
    for (int j = 0; j < angular.n_theta(); ++j)
      for (int k = 0; k < angular.n_psi(); ++k)
        F.points.push_back(from_polar({i * dr, angular.theta(j), angular.psi(k)}, s.kappa));
  F.f = f_values(s, bd, F.points);
  return F;
}

std::array<double, 3> critical_integrals(const EmbeddedSurface& s, const BoundaryData& bd, const HyperboloidPoint& p) {
  const LorentzBoost B = LorentzBoost::recentering(p);
  std::vector<double> dens(s.grid.size());
  for (std::size_t i = 0; i < dens.size(); ++i) dens[i] = s.H0[i] - bd.H[i];
  const auto w = area_weights(s.g, s.grid);
  // About o, sinh(k r) phi_i = k x_i.
  std::array<double, 3> I{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < dens.size(); ++i) {
    const LorentzVec Y = B.apply(s.X[i]);
    const double a = dens[i] * w[i] * s.kappa;
    I[0] += a * Y.x1;
    I[1] += a * Y.x2;
    I[2] += a * Y.x3;
  }
  return I;
}

FIdentityReport f_identity_checks(const InteriorField& F, const EmbeddedSurface& s, const BoundaryData& bd,
                                  double gradient_threshold) {
  if (F.n_shells < 3) throw DomainError("interior sub-grid too coarse: need at least 3 shells");
  const double k = F.kappa, k2 = k * k;
  const SphereGrid& ag = F.angular;
  const std::size_t na = ag.size();
  const MetricField unit = round_metric(ag, 1.0);
  FIdentityReport rep;

  double max_res = 0.0, max_ref = 0.0;
  for (int i = 1; i < F.n_shells; ++i) {
    ScalarField shell(na);
    for (std::size_t a = 0; a < na; ++a) shell[a] = F.f_at(i, a);
    const ScalarField ang = laplace_beltrami(shell, unit, ag);
    const double r = i * F.dr;
    const double sh = std::sinh(k * r);
    for (std::size_t a = 0; a < na; ++a) {
      const double fm = i == 1 ? F.f_center() : F.f_at(i - 1, a);
      const double fp = F.f_at(i + 1, a);
      const double f0 = shell[a];
      const double frr = (fp - 2.0 * f0 + fm) / (F.dr * F.dr);
      const double fr = (fp - fm) / (2.0 * F.dr);
      const double lap = frr + 2.0 * k / std::tanh(k * r) * fr + k2 / (sh * sh) * ang[a];
      max_res = std::max(max_res, std::abs(lap - 3.0 * k2 * f0));
      max_ref = std::max(max_ref, std::abs(3.0 * k2 * f0));
    }
  }
  rep.laplacian_rel_residual = max_ref > 0.0 ? max_res / max_ref : max_res;

  // Gradient at o in geodesic normal coordinates, from axis points at distance dr.
  std::vector<HyperboloidPoint> axis;
  const double ch = std::cosh(k * F.dr) / k, sh = std::sinh(k * F.dr) / k;
  for (int d = 0; d < 3; ++d)
    for (double sgn : {1.0, -1.0}) {
      LorentzVec v{0.0, 0.0, 0.0, ch};
      v[d] = sgn * sh;
      axis.push_back({v, k});
    }
  const auto fa = f_values(s, bd, axis);
  double g2 = 0.0;
  for (int d = 0; d < 3; ++d) {
    const double gd = (fa[static_cast<std::size_t>(2 * d)] - fa[static_cast<std::size_t>(2 * d + 1)]) / (2.0 * F.dr);
    g2 += gd * gd;
  }
  rep.gradient_norm_at_o = std::sqrt(g2);
  rep.critical_at_o = rep.gradient_norm_at_o <= gradient_threshold * std::max(1.0, std::abs(F.f_center()));
  if (rep.critical_at_o) {
    const auto I = critical_integrals(s, bd, base_point(k));
    for (int d = 0; d < 3; ++d) rep.critical_integrals[d] = I[static_cast<std::size_t>(d)];
  }

  rep.max_f = F.f_center();
  rep.max_shell = 0;
  for (int i = 1; i <= F.n_shells; ++i)
    for (std::size_t a = 0; a < na; ++a)
      if (F.f_at(i, a) > rep.max_f) {
        rep.max_f = F.f_at(i, a);
        rep.max_shell = i;
      }
  rep.max_on_boundary = rep.max_shell == F.n_shells;
  return rep;
}

CriticalPoint locate_critical_point(const EmbeddedSurface& s, const BoundaryData& bd, int max_iter, double tol) {
  const double k = s.kappa, k2 = k * k;
  const LorentzVec M = f_moment(s, bd);
  // f(x) = -k^2 <p(x), M>, p(x) = (x, sqrt(|x|^2 + 1/k^2)).
  double x[3] = {0.0, 0.0, 0.0};
  CriticalPoint cp;
  const double scale = std::max(1.0, k2 * std::abs(M.t));
  for (int it = 0; it <= max_iter; ++it) {
    const double pt = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + 1.0 / k2);
    double g[3];
    for (int d = 0; d < 3; ++d) g[d] = -k2 * (M[d] - x[d] / pt * M.t);
    cp.gradient_norm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
    cp.iterations = it;
    if (cp.gradient_norm <= tol * scale) {
      cp.converged = true;
      break;
    }
    if (it == max_iter) break;
    double Hm[3][3];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) Hm[a][b] = k2 * M.t * ((a == b ? 1.0 / pt : 0.0) - x[a] * x[b] / (pt * pt * pt));
    const double det = Hm[0][0] * (Hm[1][1] * Hm[2][2] - Hm[1][2] * Hm[2][1]) -
                       Hm[0][1] * (Hm[1][0] * Hm[2][2] - Hm[1][2] * Hm[2][0]) +
                       Hm[0][2] * (Hm[1][0] * Hm[2][1] - Hm[1][1] * Hm[2][0]);
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) break;
    double dx[3];
    for (int c = 0; c < 3; ++c) {
      double A[3][3];
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) A[a][b] = b == c ? -g[a] : Hm[a][b];
      dx[c] = (A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) - A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
               A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0])) /
              det;
    }
    for (int d = 0; d < 3; ++d) x[d] += dx[d];
  }
  const double pt = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + 1.0 / k2);
  cp.point = HyperboloidPoint{{x[0], x[1], x[2], pt}, k};
  return cp;
}

}  // namespace hypermass
