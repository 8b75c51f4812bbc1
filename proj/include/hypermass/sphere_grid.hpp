#pragma once

// Staggered latitude/longitude discretization of S^2 and the discrete calculus
// on it: a conservative Laplace-Beltrami operator for an arbitrary per-node
// metric and midpoint-rule quadrature.
//
// Layout: node (j, k) sits at theta_j = (j + 1/2) pi / n_theta and
// psi_k = 2 pi k / n_psi, and is stored at flat index j * n_psi + k.

#include <cstddef>
#include <span>
#include <vector>

#include "hypermass/lorentz.hpp"

namespace hypermass {

class SphereGrid {
 public:
  /// Throws DomainError unless n_theta >= 8, n_psi >= 16 and n_psi is even.
  SphereGrid(int n_theta, int n_psi);

  int n_theta() const { return n_theta_; }
  int n_psi() const { return n_psi_; }
  std::size_t size() const { return static_cast<std::size_t>(n_theta_) * static_cast<std::size_t>(n_psi_); }
  double d_theta() const { return d_theta_; }
  double d_psi() const { return d_psi_; }

  double theta(int j) const;
  double psi(int k) const;
  std::size_t index(int j, int k) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_psi_) + static_cast<std::size_t>(k);
  }
  /// Column across the pole: psi_k + pi.
  int antipodal_column(int k) const { return (k + n_psi_ / 2) % n_psi_; }

  friend bool operator==(const SphereGrid&, const SphereGrid&) = default;

 private:
  int n_theta_;
  int n_psi_;
  double d_theta_;
  double d_psi_;
};

struct ScalarField {
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(std::size_t n, double fill = 0.0) : values(n, fill) {}
  explicit ScalarField(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::span<const double> view() const { return values; }
  std::span<double> view() { return values; }
};

using VecField = std::vector<LorentzVec>;

/// Symmetric 2x2 tensor per node in (theta, psi) components, stored as three
/// parallel arrays.
struct MetricField {
  std::vector<double> tt;
  std::vector<double> tp;
  std::vector<double> pp;

  MetricField() = default;
  explicit MetricField(std::size_t n) : tt(n, 0.0), tp(n, 0.0), pp(n, 0.0) {}
  std::size_t size() const { return tt.size(); }
  double det(std::size_t i) const { return tt[i] * pp[i] - tp[i] * tp[i]; }
};

/// Round metric of the sphere of radius `radius`: radius^2 (dtheta^2 + sin^2 dpsi^2).
MetricField round_metric(const SphereGrid& grid, double radius = 1.0);

/// Throws GeometryError naming the first node where the metric is not
/// positive definite.
void require_positive_definite(const MetricField& g, const SphereGrid& grid);

/// (1/sqrt g) d_a (sqrt g g^{ab} d_b f), conservative second-order scheme with
/// zero flux through the polar caps and pole-crossing ghosts
/// (theta -> -theta, psi -> psi + pi) for the cross-derivative terms.
ScalarField laplace_beltrami(const ScalarField& f, const MetricField& g, const SphereGrid& grid);

/// Midpoint rule: sum f sqrt(det g) dtheta dpsi, summed in node order.
double integrate(const ScalarField& f, const MetricField& g, const SphereGrid& grid);

/// Quadrature weights sqrt(det g) dtheta dpsi per node.
std::vector<double> area_weights(const MetricField& g, const SphereGrid& grid);

/// Fixed-order dot product of values and weights (serial summation order, so
/// the result does not depend on the thread count).
double weighted_sum(std::span<const double> values, std::span<const double> weights);

}  // namespace hypermass
