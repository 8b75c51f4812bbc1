#include "hypermass/harmonics.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "hypermass/error.hpp"

namespace hypermass {

void TrigPolynomial::add(int cos_power, int sin_power, double coeff) {
  if (coeff == 0.0) return;
  auto& c = terms_[{cos_power, sin_power}];
  c += coeff;
  if (c == 0.0) terms_.erase({cos_power, sin_power});
}

TrigPolynomial TrigPolynomial::derivative() const {
  // d/dtheta cos^a sin^b = -a cos^{a-1} sin^{b+1} + b cos^{a+1} sin^{b-1}
  TrigPolynomial d;
  for (const auto& [pw, c] : terms_) {
    const auto [a, b] = pw;
    if (a > 0) d.add(a - 1, b + 1, -a * c);
    if (b > 0) d.add(a + 1, b - 1, b * c);
  }
  return d;
}

double TrigPolynomial::operator()(double theta) const {
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  double s = 0.0;
  for (const auto& [pw, c] : terms_) s += c * std::pow(ct, pw.first) * std::pow(st, pw.second);
  return s;
}

namespace {

// Coefficients of the Legendre polynomial P_l in powers of x (Bonnet recursion).
std::vector<double> legendre_coefficients(int l) {
  std::vector<double> p0{1.0};
  if (l == 0) return p0;
  std::vector<double> p1{0.0, 1.0};
  for (int n = 1; n < l; ++n) {
    // (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}
    std::vector<double> next(static_cast<std::size_t>(n + 2), 0.0);
    for (std::size_t i = 0; i < p1.size(); ++i) next[i + 1] += (2.0 * n + 1.0) * p1[i];
    for (std::size_t i = 0; i < p0.size(); ++i) next[i] -= n * p0[i];
    for (auto& c : next) c /= (n + 1.0);
    p0 = std::move(p1);
    p1 = std::move(next);
  }
  return p1;
}

}  // namespace

RealHarmonic::RealHarmonic(int l, int m) : l_(l), m_(m) {
  if (l < 0 || l > 8 || std::abs(m) > l) throw DomainError("spherical harmonic requires 0 <= l <= 8 and |m| <= l");
  auto coeffs = legendre_coefficients(l);
  const int am = std::abs(m);
  for (int d = 0; d < am; ++d) {
    std::vector<double> dc(coeffs.size() > 1 ? coeffs.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < coeffs.size(); ++i) dc[i - 1] = static_cast<double>(i) * coeffs[i];
    coeffs = std::move(dc);
  }
  for (std::size_t i = 0; i < coeffs.size(); ++i) p_.add(static_cast<int>(i), am, coeffs[i]);
  dp_ = p_.derivative();
  ddp_ = dp_.derivative();
}

double RealHarmonic::operator()(double theta, double psi) const {
  const int am = std::abs(m_);
  const double ang = m_ >= 0 ? std::cos(am * psi) : std::sin(am * psi);
  return p_(theta) * ang;
}

HarmonicJet RealHarmonic::jet(double theta, double psi) const {
  const int am = std::abs(m_);
  double a, da, dda;
  if (m_ >= 0) {
    a = std::cos(am * psi);
    da = -am * std::sin(am * psi);
  } else {
    a = std::sin(am * psi);
    da = am * std::cos(am * psi);
  }
  dda = -static_cast<double>(am * am) * a;
  const double p = p_(theta), dp = dp_(theta), ddp = ddp_(theta);
  return {p * a, dp * a, p * da, ddp * a, dp * da, p * dda};
}

}  // namespace hypermass
