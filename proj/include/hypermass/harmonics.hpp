#pragma once

// Real spherical harmonics without the Condon-Shortley phase and without
// normalization:
//   Y_lm(theta, psi) = P_l^|m|(cos theta) * (m >= 0 ? cos(m psi) : sin(|m| psi)),
//   P_l^m(x) = (1 - x^2)^{m/2} d^m/dx^m P_l(x).
// Values and derivatives up to second order are exact (symbolic
// differentiation of trigonometric monomials).

#include <map>
#include <utility>

namespace hypermass {

/// sum c_{ab} cos^a(theta) sin^b(theta)
class TrigPolynomial {
 public:
  TrigPolynomial() = default;
  void add(int cos_power, int sin_power, double coeff);
  TrigPolynomial derivative() const;
  double operator()(double theta) const;
  bool empty() const { return terms_.empty(); }

 private:
  std::map<std::pair<int, int>, double> terms_;
};

struct HarmonicJet {
  double value = 0.0;
  double d_theta = 0.0;
  double d_psi = 0.0;
  double d_theta_theta = 0.0;
  double d_theta_psi = 0.0;
  double d_psi_psi = 0.0;
};

class RealHarmonic {
 public:
  /// Throws DomainError unless 0 <= l <= 8 and |m| <= l.
  RealHarmonic(int l, int m);

  int l() const { return l_; }
  int m() const { return m_; }
  double operator()(double theta, double psi) const;
  HarmonicJet jet(double theta, double psi) const;

 private:
  int l_;
  int m_;
  TrigPolynomial p_;
  TrigPolynomial dp_;
  TrigPolynomial ddp_;
};

}  // namespace hypermass
