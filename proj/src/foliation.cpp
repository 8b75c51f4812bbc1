#include "hypermass/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypermass/error.hpp"

namespace hypermass {

MetricField shape_square(const MetricField& g, const MetricField& h) {
  MetricField q(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double id = 1.0 / g.det(i);
    const double gtt = g.tt[i], gtp = g.tp[i], gpp = g.pp[i];
    const double htt = h.tt[i], htp = h.tp[i], hpp = h.pp[i];
    q.tt[i] = (htt * htt * gpp - 2.0 * htt * htp * gtp + htp * htp * gtt) * id;
    q.tp[i] = (htt * htp * gpp - htt * hpp * gtp - htp * htp * gtp + htp * hpp * gtt) * id;
    q.pp[i] = (htp * htp * gpp - 2.0 * htp * hpp * gtp + hpp * hpp * gtt) * id;
  }
  return q;
}

FoliationLeaf leaf_at(const EmbeddedSurface& s, double rho) {
  if (!(rho >= 0.0)) throw DomainError("leaf_at requires rho >= 0");
  const double k = s.kappa;
  const std::size_t n = s.grid.size();
  FoliationLeaf L;
  L.rho = rho;
  L.kappa = k;
  L.grid = s.grid;
  if (rho == 0.0) {
    L.X = s.X;
    L.N = s.N;
    L.g = s.g;
    L.h = s.h;
  } else {
    const double c = std::cosh(k * rho), sh = std::sinh(k * rho);
    L.X.resize(n);
    L.N.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      L.X[i] = c * s.X[i] + (sh / k) * s.N[i];
      L.N[i] = (k * sh) * s.X[i] + c * s.N[i];
    }
    const MetricField q = shape_square(s.g, s.h);
    L.g = MetricField(n);
    L.h = MetricField(n);
    const double c2 = c * c, cs2k = 2.0 * c * sh / k, s2k2 = sh * sh / (k * k);
    const double kcs = k * c * sh, c2ps2 = c * c + sh * sh, csk = c * sh / k;
    for (std::size_t i = 0; i < n; ++i) {
      L.g.tt[i] = c2 * s.g.tt[i] + cs2k * s.h.tt[i] + s2k2 * q.tt[i];
      L.g.tp[i] = c2 * s.g.tp[i] + cs2k * s.h.tp[i] + s2k2 * q.tp[i];
      L.g.pp[i] = c2 * s.g.pp[i] + cs2k * s.h.pp[i] + s2k2 * q.pp[i];
      L.h.tt[i] = kcs * s.g.tt[i] + c2ps2 * s.h.tt[i] + csk * q.tt[i];
      L.h.tp[i] = kcs * s.g.tp[i] + c2ps2 * s.h.tp[i] + csk * q.tp[i];
      L.h.pp[i] = kcs * s.g.pp[i] + c2ps2 * s.h.pp[i] + csk * q.pp[i];
    }
  }
  require_positive_definite(L.g, L.grid);

  L.H0 = ScalarField(n);
  L.K = ScalarField(n);
  L.Rrho = ScalarField(n);
  L.r = ScalarField(n);
  L.dr_drho = ScalarField(n);
  for (auto& f : L.dphi_drho) f = ScalarField(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double id = 1.0 / L.g.det(i);
    L.H0[i] = (L.g.pp[i] * L.h.tt[i] - 2.0 * L.g.tp[i] * L.h.tp[i] + L.g.tt[i] * L.h.pp[i]) * id;
    const double dshape = L.h.det(i) * id;
    L.K[i] = dshape - k * k;
    L.Rrho[i] = 2.0 * dshape - 2.0 * k * k;

    const LorentzVec& X = L.X[i];
    const LorentzVec& N = L.N[i];
    const double sp = std::sqrt(X.x1 * X.x1 + X.x2 * X.x2 + X.x3 * X.x3);
    L.r[i] = rho == 0.0 ? s.r[i] : std::asinh(k * sp) / k;
    // X = (S phi / k, C / k) with S = sinh(k r), C = cosh(k r) = k t; d/drho X = N.
    const double S = k * sp, C = k * X.t;
    const double dr = N.t / S;
    L.dr_drho[i] = dr;
    const double phi[3] = {X.x1 / sp, X.x2 / sp, X.x3 / sp};
    for (int a = 0; a < 3; ++a) L.dphi_drho[static_cast<std::size_t>(a)][i] = (N[a] - C * dr * phi[a]) * k / S;
  }
  return L;
}

LeafBoundsReport check_leaf_bounds(const FoliationLeaf& leaf, double R1, double R2, double mu, double tol,
                                   int n_directions) {
  const double k = leaf.kappa;
  const double lower = std::sinh(k * R1) / std::sinh(k * R2);
  std::vector<std::array<double, 3>> ys;
  if (n_directions > 0)
    for (const auto& z : sample_null_directions(n_directions)) ys.push_back({z.x1, z.x2, z.x3});

  LeafBoundsReport rep;
  rep.tol = tol;
  constexpr double inf = std::numeric_limits<double>::infinity();
  rep.radial_margin = rep.angular_margin = rep.mu_margin = inf;
  for (std::size_t i = 0; i < leaf.grid.size(); ++i) {
    const LorentzVec& X = leaf.X[i];
    const double sp = std::sqrt(X.x1 * X.x1 + X.x2 * X.x2 + X.x3 * X.x3);
    const double phi[3] = {X.x1 / sp, X.x2 / sp, X.x3 / sp};
    const double dphi[3] = {leaf.dphi_drho[0][i], leaf.dphi_drho[1][i], leaf.dphi_drho[2][i]};
    const double dr = leaf.dr_drho[i];
    const double S = std::sinh(k * leaf.r[i]);
    const double A = k * k / (S * S) * (1.0 - dr * dr);
    const double dphi_norm = std::sqrt(dphi[0] * dphi[0] + dphi[1] * dphi[1] + dphi[2] * dphi[2]);

    rep.radial_margin = std::min(rep.radial_margin, dr - lower);
    rep.mu_margin = std::min(rep.mu_margin, mu * k * dr - dphi_norm);

    auto angular = [&](const double y[3]) {
      const double fy = y[0] * phi[0] + y[1] * phi[1] + y[2] * phi[2];
      const double dy = y[0] * dphi[0] + y[1] * dphi[1] + y[2] * dphi[2];
      return (1.0 - fy * fy) * A - dy * dy;
    };
    for (const auto& y : ys) rep.angular_margin = std::min(rep.angular_margin, angular(y.data()));
    if (dphi_norm > 0.0) {
      const double y[3] = {dphi[0] / dphi_norm, dphi[1] / dphi_norm, dphi[2] / dphi_norm};
      rep.angular_margin = std::min(rep.angular_margin, angular(y));
    }
  }
  return rep;
}

PositionResidual position_identity_residual(const FoliationLeaf& leaf) {
  const std::size_t n = leaf.grid.size();
  const double k2 = leaf.kappa * leaf.kappa;
  PositionResidual out;
  for (int a = 0; a < 4; ++a) {
    ScalarField xa(n);
    for (std::size_t i = 0; i < n; ++i) xa[i] = leaf.X[i][a];
    const ScalarField lap = laplace_beltrami(xa, leaf.g, leaf.grid);
    ScalarField res(n);
    double mx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      res[i] = leaf.H0[i] * leaf.N[i][a] + lap[i] - 2.0 * k2 * xa[i];
      mx = std::max(mx, std::abs(res[i]));
    }
    out.component[static_cast<std::size_t>(a)] = std::move(res);
    out.max_component[static_cast<std::size_t>(a)] = mx;
    out.max = std::max(out.max, mx);
  }
  return out;
}

}  // namespace hypermass
