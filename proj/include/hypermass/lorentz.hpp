#pragma once

// Minkowski space R^{3,1} with signature (+,+,+,-) and the hyperboloid model
// of hyperbolic 3-space with sectional curvature -kappa^2.

#include <array>
#include <cmath>
#include <string_view>
#include <vector>

namespace hypermass {

struct LorentzVec {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;
  double t = 0.0;

  constexpr LorentzVec() = default;
  constexpr LorentzVec(double a, double b, double c, double time) : x1(a), x2(b), x3(c), t(time) {}

  constexpr double operator[](int i) const { return i == 0 ? x1 : i == 1 ? x2 : i == 2 ? x3 : t; }
  constexpr double& operator[](int i) { return i == 0 ? x1 : i == 1 ? x2 : i == 2 ? x3 : t; }

  constexpr LorentzVec& operator+=(const LorentzVec& o) {
    x1 += o.x1; x2 += o.x2; x3 += o.x3; t += o.t;
    return *this;
  }
  constexpr LorentzVec& operator-=(const LorentzVec& o) {
    x1 -= o.x1; x2 -= o.x2; x3 -= o.x3; t -= o.t;
    return *this;
  }
  constexpr LorentzVec& operator*=(double s) {
    x1 *= s; x2 *= s; x3 *= s; t *= s;
    return *this;
  }

  friend constexpr LorentzVec operator+(LorentzVec a, const LorentzVec& b) { return a += b; }
  friend constexpr LorentzVec operator-(LorentzVec a, const LorentzVec& b) { return a -= b; }
  friend constexpr LorentzVec operator*(double s, LorentzVec a) { return a *= s; }
  friend constexpr LorentzVec operator*(LorentzVec a, double s) { return a *= s; }
  friend constexpr LorentzVec operator-(LorentzVec a) { return a *= -1.0; }
  friend constexpr bool operator==(const LorentzVec&, const LorentzVec&) = default;
};

/// Lorentz inner product x1 y1 + x2 y2 + x3 y3 - t s.
constexpr double inner(const LorentzVec& a, const LorentzVec& b) {
  return a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3 - a.t * b.t;
}

/// Euclidean squared length of all four components; used as a scale for
/// relative tolerances.
constexpr double euclidean_norm_sq(const LorentzVec& a) {
  return a.x1 * a.x1 + a.x2 * a.x2 + a.x3 * a.x3 + a.t * a.t;
}

enum class CausalClass { zero, future_null, past_null, future_timelike, past_timelike, spacelike };

std::string_view to_string(CausalClass c);

/// Causal character of v.  The vector is `zero` when every component is within
/// tol of 0; it is null when |<v,v>| <= tol * |v|_E^2.
CausalClass classify(const LorentzVec& v, double tol);

inline bool is_future_causal(CausalClass c) {
  return c == CausalClass::future_null || c == CausalClass::future_timelike;
}

struct PolarCoords {
  double r = 0.0;      // geodesic distance from the base point
  double theta = 0.0;  // [0, pi]
  double psi = 0.0;    // [0, 2pi)
};

/// A point on the upper sheet {<X,X> = -1/kappa^2, t > 0}.
struct HyperboloidPoint {
  LorentzVec vec;
  double kappa = 1.0;

  /// Throws GeometryError when vec is off the hyperboloid (relative 1e-10) or
  /// on the lower sheet.
  static HyperboloidPoint checked(const LorentzVec& v, double kappa);
};

/// Base point o = (0,0,0,1/kappa).
HyperboloidPoint base_point(double kappa);

/// (1/kappa)(sinh(kr) cos(theta), sinh(kr) sin(theta) cos(psi),
///           sinh(kr) sin(theta) sin(psi), cosh(kr)).
HyperboloidPoint from_polar(const PolarCoords& p, double kappa);

/// Inverse of from_polar.  At r = 0 the angles are reported as 0.
PolarCoords to_polar(const HyperboloidPoint& p);

/// Unit direction (phi_1, phi_2, phi_3) on S^2 for polar angles (theta, psi).
std::array<double, 3> sphere_direction(double theta, double psi);

/// Geodesic distance: cosh(kappa d) = -kappa^2 <a, b>.
double distance(const HyperboloidPoint& a, const HyperboloidPoint& b);

/// Same as distance() but on raw vectors sharing one kappa; used in the
/// quadrature inner loops.
double distance_raw(const LorentzVec& a, const LorentzVec& b, double kappa);

/// n future-directed null vectors (w, 1) with w on a Fibonacci spiral covering
/// of S^2 that starts at the north pole (0,0,1).
std::vector<LorentzVec> sample_null_directions(int n);

/// A handful of future timelike unit vectors: the pure time direction and
/// boosted ones with speed `speed` along the sampled spiral directions.
std::vector<LorentzVec> sample_timelike_directions(int n, double speed = 0.5);

/// Pure Lorentz boost that maps `p` to the base point o while preserving the
/// time orientation.  Spatial directions orthogonal to p's spatial part are
/// left untouched.
class LorentzBoost {
 public:
  LorentzBoost() = default;
  static LorentzBoost recentering(const HyperboloidPoint& p);

  LorentzVec apply(const LorentzVec& v) const;
  const std::array<std::array<double, 4>, 4>& matrix() const { return m_; }

 private:
  std::array<std::array<double, 4>, 4> m_{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
};

}  // namespace hypermass
