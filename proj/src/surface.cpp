#include "hypermass/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hypermass/error.hpp"

namespace hypermass {

RadialSpec RadialSpec::round(double kappa, double R0) {
  RadialSpec s;
  s.kappa = kappa;
  s.mode = Mode::round;
  s.R0 = R0;
  return s;
}

RadialSpec RadialSpec::harmonic(double kappa, double R0, std::vector<HarmonicTerm> terms) {
  RadialSpec s = round(kappa, R0);
  s.mode = Mode::harmonic;
  s.terms = std::move(terms);
  return s;
}

RadialSpec RadialSpec::from_table(double kappa, std::vector<double> r) {
  RadialSpec s;
  s.kappa = kappa;
  s.mode = Mode::table;
  s.table = std::move(r);
  return s;
}

namespace {

struct Jet {
  LorentzVec X, Xt, Xp, Xtt, Xtp, Xpp;
};

// Scalar jet of r(theta, psi) at a node.
using RJet = HarmonicJet;

std::vector<RealHarmonic> make_harmonics(const RadialSpec& spec) {
  std::vector<RealHarmonic> hs;
  for (const auto& t : spec.terms) {
    if (t.l > 4) throw DomainError("harmonic perturbations are limited to l <= 4");
    hs.emplace_back(t.l, t.m);
  }
  return hs;
}

RJet radial_jet(const RadialSpec& spec, const std::vector<RealHarmonic>& hs, double theta, double psi) {
  RJet j;
  j.value = spec.R0;
  if (spec.mode == RadialSpec::Mode::harmonic) {
    for (std::size_t n = 0; n < hs.size(); ++n) {
      const double e = spec.R0 * spec.terms[n].epsilon;
      if (e == 0.0) continue;
      const auto y = hs[n].jet(theta, psi);
      j.value += e * y.value;
      j.d_theta += e * y.d_theta;
      j.d_psi += e * y.d_psi;
      j.d_theta_theta += e * y.d_theta_theta;
      j.d_theta_psi += e * y.d_theta_psi;
      j.d_psi_psi += e * y.d_psi_psi;
    }
  }
  return j;
}

LorentzVec spatial(const std::array<double, 3>& a, double t = 0.0) { return {a[0], a[1], a[2], t}; }

// Position jet of X = (1/k)(sinh(k r) phi, cosh(k r)) from the jet of r.
Jet analytic_jet(const RJet& r, double theta, double psi, double k) {
  const double ct = std::cos(theta), st = std::sin(theta), cp = std::cos(psi), sp = std::sin(psi);
  const std::array<double, 3> phi{ct, st * cp, st * sp};
  const std::array<double, 3> phi_t{-st, ct * cp, ct * sp};
  const std::array<double, 3> phi_p{0.0, -st * sp, st * cp};
  const std::array<double, 3> phi_tt{-ct, -st * cp, -st * sp};
  const std::array<double, 3> phi_tp{0.0, -ct * sp, ct * cp};
  const std::array<double, 3> phi_pp{0.0, -st * cp, -st * sp};

  const double S = std::sinh(k * r.value), C = std::cosh(k * r.value);
  const double ra = r.d_theta, rb = r.d_psi;
  const double St = k * C * ra, Sp = k * C * rb;
  const double Ct = k * S * ra, Cp = k * S * rb;
  const double Stt = k * (k * S * ra * ra + C * r.d_theta_theta);
  const double Stp = k * (k * S * ra * rb + C * r.d_theta_psi);
  const double Spp = k * (k * S * rb * rb + C * r.d_psi_psi);
  const double Ctt = k * (k * C * ra * ra + S * r.d_theta_theta);
  const double Ctp = k * (k * C * ra * rb + S * r.d_theta_psi);
  const double Cpp = k * (k * C * rb * rb + S * r.d_psi_psi);

  const double ik = 1.0 / k;
  auto comb = [](double a, const std::array<double, 3>& u, double b, const std::array<double, 3>& v) {
    return std::array<double, 3>{a * u[0] + b * v[0], a * u[1] + b * v[1], a * u[2] + b * v[2]};
  };
  Jet j;
  j.X = ik * spatial(comb(S, phi, 0.0, phi), C);
  j.Xt = ik * spatial(comb(St, phi, S, phi_t), Ct);
  j.Xp = ik * spatial(comb(Sp, phi, S, phi_p), Cp);
  auto second = [&](double Sab, double Sa, const std::array<double, 3>& pb, double Sb, const std::array<double, 3>& pa,
                    const std::array<double, 3>& pab, double Cab) {
    std::array<double, 3> v;
    for (int i = 0; i < 3; ++i) v[i] = Sab * phi[i] + Sa * pb[i] + Sb * pa[i] + S * pab[i];
    return ik * spatial(v, Cab);
  };
  j.Xtt = second(Stt, St, phi_t, St, phi_t, phi_tt, Ctt);
  j.Xtp = second(Stp, St, phi_p, Sp, phi_t, phi_tp, Ctp);
  j.Xpp = second(Spp, Sp, phi_p, Sp, phi_p, phi_pp, Cpp);
  return j;
}

double det3(double a, double b, double c, double d, double e, double f, double g, double h, double i) {
  return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

// Covector w(v) = det[v; a; b; c] with the index raised by the metric.
LorentzVec lorentz_cross(const LorentzVec& a, const LorentzVec& b, const LorentzVec& c) {
  double w[4];
  for (int nu = 0; nu < 4; ++nu) {
    int cols[3], n = 0;
    for (int m = 0; m < 4; ++m)
      if (m != nu) cols[n++] = m;
    const double minor = det3(a[cols[0]], a[cols[1]], a[cols[2]], b[cols[0]], b[cols[1]], b[cols[2]], c[cols[0]],
                              c[cols[1]], c[cols[2]]);
    w[nu] = (nu % 2 == 0 ? 1.0 : -1.0) * minor;
  }
  return {w[0], w[1], w[2], -w[3]};
}

// Direction of increasing r at X (up to a positive factor).
LorentzVec radial_direction(const LorentzVec& X) {
  const double sp = std::sqrt(X.x1 * X.x1 + X.x2 * X.x2 + X.x3 * X.x3);
  if (sp == 0.0) return {0.0, 0.0, 0.0, 0.0};
  return {X.t * X.x1 / sp, X.t * X.x2 / sp, X.t * X.x3 / sp, sp};
}

std::string node_name(const SphereGrid& grid, std::size_t i) {
  std::ostringstream os;
  os << "node " << i << " (j=" << i / static_cast<std::size_t>(grid.n_psi())
     << ", k=" << i % static_cast<std::size_t>(grid.n_psi()) << ")";
  return os.str();
}

EmbeddedSurface assemble(const SphereGrid& grid, double kappa, const std::vector<Jet>& jets, std::vector<double> r) {
  const std::size_t n = grid.size();
  EmbeddedSurface s{grid, kappa, VecField(n), VecField(n), MetricField(n), MetricField(n),
                    ScalarField(n), ScalarField(n), ScalarField(std::move(r))};
  for (std::size_t i = 0; i < n; ++i) {
    const Jet& j = jets[i];
    s.X[i] = j.X;
    s.g.tt[i] = inner(j.Xt, j.Xt);
    s.g.tp[i] = inner(j.Xt, j.Xp);
    s.g.pp[i] = inner(j.Xp, j.Xp);
    const double dg = s.g.det(i);
    if (!(dg > 0.0)) {
      std::ostringstream os;
      os << "degenerate tangents at " << node_name(grid, i) << ": det g = " << dg;
      throw GeometryError(os.str());
    }
    LorentzVec N = lorentz_cross(j.X, j.Xt, j.Xp);
    const double nn = inner(N, N);
    if (!(nn > 0.0)) throw GeometryError("normal is not spacelike at " + node_name(grid, i));
    N *= 1.0 / std::sqrt(nn);
    if (inner(N, radial_direction(j.X)) < 0.0) N = -N;
    s.N[i] = N;
    s.h.tt[i] = -inner(j.Xtt, N);
    s.h.tp[i] = -inner(j.Xtp, N);
    s.h.pp[i] = -inner(j.Xpp, N);
    const double id = 1.0 / dg;
    s.H0[i] = (s.g.pp[i] * s.h.tt[i] - 2.0 * s.g.tp[i] * s.h.tp[i] + s.g.tt[i] * s.h.pp[i]) * id;
    s.K[i] = -kappa * kappa + s.h.det(i) * id;
  }
  return s;
}

// Second-order finite-difference jets of the node positions; rows beyond the
// poles come from the antipodal column of the first/last row.
std::vector<Jet> finite_difference_jets(const SphereGrid& grid, const VecField& X) {
  const int nt = grid.n_theta(), np = grid.n_psi();
  const double ht = grid.d_theta(), hp = grid.d_psi();
  auto at = [&](int j, int k) -> const LorentzVec& {
    k = ((k % np) + np) % np;
    if (j < 0) return X[grid.index(-j - 1, grid.antipodal_column(k))];
    if (j >= nt) return X[grid.index(2 * nt - 1 - j, grid.antipodal_column(k))];
    return X[grid.index(j, k)];
  };
  std::vector<Jet> jets(grid.size());
  for (int j = 0; j < nt; ++j) {
    for (int k = 0; k < np; ++k) {
      Jet& J = jets[grid.index(j, k)];
      const LorentzVec& c = at(j, k);
      const LorentzVec& n = at(j - 1, k);
      const LorentzVec& s = at(j + 1, k);
      const LorentzVec& w = at(j, k - 1);
      const LorentzVec& e = at(j, k + 1);
      J.X = c;
      J.Xt = (s - n) * (0.5 / ht);
      J.Xp = (e - w) * (0.5 / hp);
      J.Xtt = (s - 2.0 * c + n) * (1.0 / (ht * ht));
      J.Xpp = (e - 2.0 * c + w) * (1.0 / (hp * hp));
      J.Xtp = ((at(j + 1, k + 1) - at(j + 1, k - 1)) - (at(j - 1, k + 1) - at(j - 1, k - 1))) * (0.25 / (ht * hp));
    }
  }
  return jets;
}

void require_positive_radius(const std::vector<double>& r, const SphereGrid& grid) {
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0.0) || !std::isfinite(r[i])) {
      std::ostringstream os;
      os << "radial function not positive at " << node_name(grid, i) << ": r = " << r[i];
      throw GeometryError(os.str());
    }
  }
}

double radius_of(const LorentzVec& X, double kappa) {
  const double sp = std::sqrt(X.x1 * X.x1 + X.x2 * X.x2 + X.x3 * X.x3);
  return std::asinh(kappa * sp) / kappa;
}

}  // namespace

std::vector<double> radial_values(const RadialSpec& spec, const SphereGrid& grid) {
  if (spec.mode == RadialSpec::Mode::table) {
    if (spec.table.size() != grid.size()) {
      std::ostringstream os;
      os << "radial table has " << spec.table.size() << " values, grid has " << grid.size() << " nodes";
      throw GeometryError(os.str());
    }
    return spec.table;
  }
  const auto hs = make_harmonics(spec);
  std::vector<double> r(grid.size());
  for (int j = 0; j < grid.n_theta(); ++j)
    for (int k = 0; k < grid.n_psi(); ++k)
      r[grid.index(j, k)] = radial_jet(spec, hs, grid.theta(j), grid.psi(k)).value;
  return r;
}

EmbeddedSurface build_surface(const RadialSpec& spec, const SphereGrid& grid) {
  if (!(spec.kappa > 0.0)) throw GeometryError("curvature scale kappa must be positive");
  auto r = radial_values(spec, grid);
  require_positive_radius(r, grid);
  std::vector<Jet> jets;
  if (spec.mode == RadialSpec::Mode::table) {
    VecField X(grid.size());
    for (int j = 0; j < grid.n_theta(); ++j)
      for (int k = 0; k < grid.n_psi(); ++k) {
        const auto i = grid.index(j, k);
        X[i] = from_polar({r[i], grid.theta(j), grid.psi(k)}, spec.kappa).vec;
      }
    jets = finite_difference_jets(grid, X);
  } else {
    const auto hs = make_harmonics(spec);
    jets.resize(grid.size());
    for (int j = 0; j < grid.n_theta(); ++j)
      for (int k = 0; k < grid.n_psi(); ++k)
        jets[grid.index(j, k)] =
            analytic_jet(radial_jet(spec, hs, grid.theta(j), grid.psi(k)), grid.theta(j), grid.psi(k), spec.kappa);
  }
  return assemble(grid, spec.kappa, jets, std::move(r));
}

std::pair<double, double> principal_curvatures(const MetricField& g, const MetricField& h, std::size_t i) {
  // entries of S = g^-1 h; the half-difference form keeps umbilic points accurate
  const double dg = g.det(i);
  const double s11 = (g.pp[i] * h.tt[i] - g.tp[i] * h.tp[i]) / dg;
  const double s12 = (g.pp[i] * h.tp[i] - g.tp[i] * h.pp[i]) / dg;
  const double s21 = (g.tt[i] * h.tp[i] - g.tp[i] * h.tt[i]) / dg;
  const double s22 = (g.tt[i] * h.pp[i] - g.tp[i] * h.tp[i]) / dg;
  const double half = 0.5 * (s11 - s22);
  const double disc = std::sqrt(std::max(0.0, half * half + s12 * s21));
  const double mid = 0.5 * (s11 + s22);
  return {mid - disc, mid + disc};
}

bool HypothesisReport::all_pass() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.pass; });
}

const ConditionResult* HypothesisReport::first_failure() const {
  for (const auto& c : conditions)
    if (!c.pass) return &c;
  return nullptr;
}

const ConditionResult& HypothesisReport::get(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw Error("no hypothesis condition named " + name);
}

HypothesisReport validate_hypotheses(const EmbeddedSurface& s, const BoundaryData& bd) {
  const std::size_t n = s.grid.size();
  if (bd.H.size() != n) throw GeometryError("boundary mean curvature field size does not match grid");
  const double k2 = s.kappa * s.kappa;
  auto scan = [&](const std::string& name, auto&& value) {
    ConditionResult c;
    c.name = name;
    c.margin = std::numeric_limits<double>::infinity();
    std::size_t worst = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = value(i);
      if (!(v >= c.margin)) {  // also catches NaN
        c.margin = v;
        worst = i;
        if (std::isnan(v)) break;
      }
    }
    c.pass = c.margin > 0.0;
    c.worst_j = static_cast<int>(worst / static_cast<std::size_t>(s.grid.n_psi()));
    c.worst_k = static_cast<int>(worst % static_cast<std::size_t>(s.grid.n_psi()));
    return c;
  };
  HypothesisReport rep;
  rep.conditions.push_back(scan("K > -kappa^2", [&](std::size_t i) { return s.K[i] + k2; }));
  rep.conditions.push_back(scan("convexity", [&](std::size_t i) { return principal_curvatures(s.g, s.h, i).first; }));
  rep.conditions.push_back(scan("H > 0", [&](std::size_t i) { return bd.H[i]; }));
  rep.conditions.push_back(scan("H0 > 0", [&](std::size_t i) { return s.H0[i]; }));
  return rep;
}

RadiiAlpha alpha_from_radii(double R1, double R2, double kappa) {
  if (!(R1 > 0.0) || !(R2 >= R1)) throw GeometryError("radii require 0 < R1 <= R2 (r not everywhere positive)");
  const double s1 = std::sinh(kappa * R1), s2 = std::sinh(kappa * R2);
  const double mu = std::sqrt(std::max(0.0, (s2 * s2) / (s1 * s1) - 1.0)) / s1;
  return {R1, R2, 1.0 / std::tanh(kappa * R1) + mu, mu};
}

RadiiAlpha radii_and_alpha(const EmbeddedSurface& s) {
  require_positive_radius(s.r.values, s.grid);
  const auto [lo, hi] = std::minmax_element(s.r.values.begin(), s.r.values.end());
  return alpha_from_radii(*lo, *hi, s.kappa);
}

EmbeddedSurface recenter(const EmbeddedSurface& s, const LorentzBoost& boost) {
  EmbeddedSurface out = s;
  for (std::size_t i = 0; i < s.X.size(); ++i) {
    out.X[i] = boost.apply(s.X[i]);
    out.N[i] = boost.apply(s.N[i]);
    out.r[i] = radius_of(out.X[i], s.kappa);
  }
  return out;
}

}  // namespace hypermass
