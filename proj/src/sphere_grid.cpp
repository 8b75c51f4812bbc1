#include "hypermass/sphere_grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hypermass/error.hpp"
#include "hypermass/kernels.hpp"

namespace hypermass {

SphereGrid::SphereGrid(int n_theta, int n_psi) : n_theta_(n_theta), n_psi_(n_psi) {
  if (n_theta < 8) throw DomainError("SphereGrid: n_theta must be >= 8");
  if (n_psi < 16) throw DomainError("SphereGrid: n_psi must be >= 16");
  if (n_psi % 2 != 0) throw DomainError("SphereGrid: n_psi must be even");
  d_theta_ = std::numbers::pi / n_theta;
  d_psi_ = 2.0 * std::numbers::pi / n_psi;
}

double SphereGrid::theta(int j) const { return (j + 0.5) * d_theta_; }
double SphereGrid::psi(int k) const { return k * d_psi_; }

MetricField round_metric(const SphereGrid& grid, double radius) {
  MetricField g(grid.size());
  const double r2 = radius * radius;
  for (int j = 0; j < grid.n_theta(); ++j) {
    const double st = std::sin(grid.theta(j));
    for (int k = 0; k < grid.n_psi(); ++k) {
      const auto i = grid.index(j, k);
      g.tt[i] = r2;
      g.pp[i] = r2 * st * st;
    }
  }
  return g;
}

void require_positive_definite(const MetricField& g, const SphereGrid& grid) {
  if (g.size() != grid.size()) throw GeometryError("metric field size does not match grid");
  for (int j = 0; j < grid.n_theta(); ++j) {
    for (int k = 0; k < grid.n_psi(); ++k) {
      const auto i = grid.index(j, k);
      const double det = g.det(i);
      if (!(det > 0.0) || !(g.tt[i] + g.pp[i] > 0.0)) {
        std::ostringstream os;
        os << "metric not positive definite at node (j=" << j << ", k=" << k << "): det = " << det;
        throw GeometryError(os.str());
      }
    }
  }
}

ScalarField laplace_beltrami(const ScalarField& f, const MetricField& g, const SphereGrid& grid) {
  require_positive_definite(g, grid);
  if (f.size() != grid.size()) throw GeometryError("scalar field size does not match grid");
  const std::size_t n = grid.size();
  std::vector<double> att(n), atp(n), app(n), isg(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rs = 1.0 / std::sqrt(g.det(i));
    att[i] = g.pp[i] * rs;
    atp[i] = -(g.tp[i] * rs);
    app[i] = g.tt[i] * rs;
    isg[i] = rs;
  }
  const int np = grid.n_psi();
  const int nt = grid.n_theta();
  std::vector<double> north(static_cast<std::size_t>(np)), south(static_cast<std::size_t>(np));
  for (int k = 0; k < np; ++k) {
    north[static_cast<std::size_t>(k)] = f[grid.index(0, grid.antipodal_column(k))];
    south[static_cast<std::size_t>(k)] = f[grid.index(nt - 1, grid.antipodal_column(k))];
  }
  ScalarField out(n);
  kernels::laplacian_rows({nt, np, grid.d_theta(), grid.d_psi()}, f.view(), {north, south}, {att, atp, app, isg},
                          out.view(), 0, nt);
  return out;
}

std::vector<double> area_weights(const MetricField& g, const SphereGrid& grid) {
  require_positive_definite(g, grid);
  std::vector<double> w(grid.size());
  const double cell = grid.d_theta() * grid.d_psi();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sqrt(g.det(i)) * cell;
  return w;
}

double weighted_sum(std::span<const double> values, std::span<const double> weights) {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * weights[i];
  return s;
}

double integrate(const ScalarField& f, const MetricField& g, const SphereGrid& grid) {
  if (f.size() != grid.size()) throw GeometryError("scalar field size does not match grid");
  const auto w = area_weights(g, grid);
  return weighted_sum(f.view(), w);
}

}  // namespace hypermass
