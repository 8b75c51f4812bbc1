#include "hypermass/lorentz.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "hypermass/error.hpp"

namespace hypermass {

std::string_view to_string(CausalClass c) {
  switch (c) {
    case CausalClass::zero: return "zero";
    case CausalClass::future_null: return "future-null";
    case CausalClass::past_null: return "past-null";
    case CausalClass::future_timelike: return "future-timelike";
    case CausalClass::past_timelike: return "past-timelike";
    case CausalClass::spacelike: return "spacelike";
  }
  return "unknown";
}

CausalClass classify(const LorentzVec& v, double tol) {
  const double amax = std::max({std::abs(v.x1), std::abs(v.x2), std::abs(v.x3), std::abs(v.t)});
  if (amax <= tol) return CausalClass::zero;
  const double q = inner(v, v);
  const double scale = euclidean_norm_sq(v);
  if (std::abs(q) <= tol * scale) return v.t > 0.0 ? CausalClass::future_null : CausalClass::past_null;
  if (q < 0.0) return v.t > 0.0 ? CausalClass::future_timelike : CausalClass::past_timelike;
  return CausalClass::spacelike;
}

HyperboloidPoint HyperboloidPoint::checked(const LorentzVec& v, double kappa) {
  if (!(kappa > 0.0)) throw GeometryError("curvature scale kappa must be positive");
  const double target = -1.0 / (kappa * kappa);
  const double q = inner(v, v);
  if (std::abs(q - target) > 1e-10 * std::abs(target) || !(v.t > 0.0)) {
    std::ostringstream os;
    os << "vector is not on the upper hyperboloid sheet: <X,X> = " << q << ", expected " << target;
    throw GeometryError(os.str());
  }
  return HyperboloidPoint{v, kappa};
}

HyperboloidPoint base_point(double kappa) { return HyperboloidPoint{{0.0, 0.0, 0.0, 1.0 / kappa}, kappa}; }

std::array<double, 3> sphere_direction(double theta, double psi) {
  const double st = std::sin(theta);
  return {std::cos(theta), st * std::cos(psi), st * std::sin(psi)};
}

HyperboloidPoint from_polar(const PolarCoords& p, double kappa) {
  if (!(kappa > 0.0)) throw GeometryError("curvature scale kappa must be positive");
  const double sh = std::sinh(kappa * p.r) / kappa;
  const double ch = std::cosh(kappa * p.r) / kappa;
  const auto phi = sphere_direction(p.theta, p.psi);
  return HyperboloidPoint{{sh * phi[0], sh * phi[1], sh * phi[2], ch}, kappa};
}

PolarCoords to_polar(const HyperboloidPoint& p) {
  const double k = p.kappa;
  const double rho_sp = std::sqrt(p.vec.x1 * p.vec.x1 + p.vec.x2 * p.vec.x2 + p.vec.x3 * p.vec.x3);
  PolarCoords out;
  // asinh of the spatial radius is better conditioned than acosh(kappa t) near o.
  out.r = std::asinh(k * rho_sp) / k;
  if (rho_sp == 0.0) return out;
  out.theta = std::acos(std::clamp(p.vec.x1 / rho_sp, -1.0, 1.0));
  double psi = std::atan2(p.vec.x3, p.vec.x2);
  if (psi < 0.0) psi += 2.0 * std::numbers::pi;
  out.psi = psi;
  return out;
}

double distance_raw(const LorentzVec& a, const LorentzVec& b, double kappa) {
  const double arg = -kappa * kappa * inner(a, b);
  if (arg < 1.0) {
    if (arg >= 1.0 - 1e-12) return 0.0;
    std::ostringstream os;
    os << "cosh argument " << arg << " below 1: points are not on a common hyperboloid";
    throw GeometryError(os.str());
  }
  return std::acosh(arg) / kappa;
}

double distance(const HyperboloidPoint& a, const HyperboloidPoint& b) {
  if (a.kappa != b.kappa) throw GeometryError("incompatible curvature scales");
  return distance_raw(a.vec, b.vec, a.kappa);
}

std::vector<LorentzVec> sample_null_directions(int n) {
  if (n < 1) throw DomainError("sample_null_directions requires n >= 1");
  std::vector<LorentzVec> out;
  out.reserve(static_cast<std::size_t>(n));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = n == 1 ? 1.0 : 1.0 - 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double a = golden * static_cast<double>(i);
    double wx = rad * std::cos(a);
    double wy = rad * std::sin(a);
    // Renormalize so the spatial part has unit length to the last bit we can get.
    const double len = std::sqrt(wx * wx + wy * wy + z * z);
    wx /= len;
    wy /= len;
    out.emplace_back(wx, wy, z / len, 1.0);
  }
  return out;
}

std::vector<LorentzVec> sample_timelike_directions(int n, double speed) {
  std::vector<LorentzVec> out{{0.0, 0.0, 0.0, 1.0}};
  if (n <= 1) return out;
  const double gamma = 1.0 / std::sqrt(1.0 - speed * speed);
  for (const auto& z : sample_null_directions(n - 1)) {
    out.emplace_back(gamma * speed * z.x1, gamma * speed * z.x2, gamma * speed * z.x3, gamma);
  }
  return out;
}

LorentzBoost LorentzBoost::recentering(const HyperboloidPoint& p) {
  LorentzBoost b;
  const double k = p.kappa;
  const double sp = std::sqrt(p.vec.x1 * p.vec.x1 + p.vec.x2 * p.vec.x2 + p.vec.x3 * p.vec.x3);
  if (sp == 0.0) return b;
  const std::array<double, 3> n{p.vec.x1 / sp, p.vec.x2 / sp, p.vec.x3 / sp};
  const double ch = k * p.vec.t;  // cosh(kappa d)
  const double sh = k * sp;       // sinh(kappa d)
  // x' = x + (ch - 1)(n.x) n - sh t n ;  t' = ch t - sh (n.x)
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) b.m_[i][j] = (i == j ? 1.0 : 0.0) + (ch - 1.0) * n[i] * n[j];
    b.m_[i][3] = -sh * n[i];
    b.m_[3][i] = -sh * n[i];
  }
  b.m_[3][3] = ch;
  return b;
}

LorentzVec LorentzBoost::apply(const LorentzVec& v) const {
  LorentzVec out;
  for (int i = 0; i < 4; ++i) {
    out[i] = m_[i][0] * v.x1 + m_[i][1] * v.x2 + m_[i][2] * v.x3 + m_[i][3] * v.t;
  }
  return out;
}

}  // namespace hypermass
