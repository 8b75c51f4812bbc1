#include "hypermass/qs_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hypermass/error.hpp"
#include "hypermass/kernels.hpp"
#include "hypermass/mass.hpp"

namespace hypermass {

ScalarField FlowSample::u_field() const {
  ScalarField u(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) u[i] = 1.0 + v[i];
  return u;
}

ScalarField initial_u(const EmbeddedSurface& s, const BoundaryData& bd) {
  if (bd.H.size() != s.grid.size()) throw DomainError("boundary mean curvature field size does not match grid");
  ScalarField u(s.grid.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(bd.H[i] > 0.0)) throw DomainError("initial_u requires H > 0 at every node");
    if (!(s.H0[i] > 0.0)) throw DomainError("initial_u requires H0 > 0 at every node");
    u[i] = s.H0[i] / bd.H[i];
  }
  return u;
}

QSState initial_state(std::shared_ptr<const EmbeddedSurface> s, ScalarField u0) {
  QSState st;
  st.rho = 0.0;
  st.leaf = leaf_at(*s, 0.0);
  st.u = std::move(u0);
  st.base = std::move(s);
  return st;
}

QSState step_u(const QSState& state, double d_rho) {
  if (!(d_rho > 0.0)) throw DomainError("step_u requires d_rho > 0");
  if (!state.base) throw DomainError("step_u requires the base surface");
  const FoliationLeaf& L = state.leaf;
  const double k2 = L.kappa * L.kappa;
  const ScalarField lap = laplace_beltrami(state.u, L.g, L.grid);
  QSState next;
  next.rho = state.rho + d_rho;
  next.base = state.base;
  next.u = ScalarField(state.u.size());
  for (std::size_t i = 0; i < state.u.size(); ++i) {
    const double u = state.u[i];
    const double rhs = 2.0 * u * u * lap[i] + (u - u * u * u) * (L.Rrho[i] + 6.0 * k2);
    const double un = u + d_rho * rhs / (2.0 * L.H0[i]);
    if (!std::isfinite(un)) throw NumericalError("non-finite values in u", next.rho);
    if (!(un > 0.0)) throw NumericalError("stability violated; reduce cfl", next.rho);
    next.u[i] = un;
  }
  next.leaf = leaf_at(*state.base, next.rho);
  return next;
}

double stable_step(const FoliationLeaf& leaf, const ScalarField& u, double cfl, double max_step) {
  const double ht2 = leaf.grid.d_theta() * leaf.grid.d_theta();
  const double hp2 = leaf.grid.d_psi() * leaf.grid.d_psi();
  double min_h = std::numeric_limits<double>::infinity(), min_sp = min_h, max_u2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    min_h = std::min(min_h, leaf.H0[i]);
    min_sp = std::min(min_sp, std::min(leaf.g.tt[i] * ht2, leaf.g.pp[i] * hp2));
    max_u2 = std::max(max_u2, u[i] * u[i]);
  }
  return std::min(max_step, cfl * (2.0 * min_h) * min_sp / (2.0 * max_u2));
}

namespace {

struct LeafCoeffs {
  std::vector<double> att, atp, app, lap_scale, reac_rate;
  kernels::LeafReduction red{};

  explicit LeafCoeffs(std::size_t n) : att(n), atp(n), app(n), lap_scale(n), reac_rate(n) {}
};

struct Reduction {
  double max_u_sq = 0.0;
  double min_u = std::numeric_limits<double>::infinity();
  bool ok = true;

  void merge(const kernels::StepReduction& r) {
    max_u_sq = std::max(max_u_sq, r.max_u_sq);
    min_u = std::min(min_u, r.min_u);
    ok = ok && r.finite_positive;
  }
};

// Owns the per-node basis (g, h, tr S, det S) of the base surface and runs the
// node-parallel kernels in fixed contiguous chunks.
class Solver {
 public:
  Solver(const EmbeddedSurface& s, WorkerPool& pool)
      : grid_(s.grid), kappa_(s.kappa), g_(s.g), h_(s.h), pool_(pool),
        chunks_(std::max(1, std::min(pool.workers(), s.grid.n_theta()))),
        north_(static_cast<std::size_t>(s.grid.n_psi())), south_(static_cast<std::size_t>(s.grid.n_psi())),
        tr_s_(s.grid.size()), det_s_(s.grid.size()), isg0_(s.grid.size()) {
    for (std::size_t i = 0; i < size(); ++i) {
      const double dg = g_.tt[i] * g_.pp[i] - g_.tp[i] * g_.tp[i];
      const double dh = h_.tt[i] * h_.pp[i] - h_.tp[i] * h_.tp[i];
      tr_s_[i] = (g_.pp[i] * h_.tt[i] - 2.0 * g_.tp[i] * h_.tp[i] + g_.tt[i] * h_.pp[i]) / dg;
      det_s_[i] = dh / dg;
      isg0_[i] = 1.0 / std::sqrt(dg);
    }
  }

  std::size_t size() const { return grid_.size(); }

  void coeffs_at(double rho, LeafCoeffs& c) {
    const auto sc = kernels::LeafScalars::at(rho, kappa_, grid_.d_theta(), grid_.d_psi());
    const kernels::LeafBasis b{g_.tt, g_.tp, g_.pp, h_.tt, h_.tp, h_.pp, tr_s_, det_s_, isg0_};
    const kernels::LeafCoeffsOut o{c.att, c.atp, c.app, c.lap_scale, c.reac_rate};
    std::vector<kernels::LeafReduction> parts(static_cast<std::size_t>(chunks_));
    pool_.run(chunks_, [&](int ch) {
      const auto [b0, b1] = chunk_range(size(), chunks_, ch);
      parts[static_cast<std::size_t>(ch)] = kernels::leaf_coefficients(b, sc, o, b0, b1);
    });
    constexpr double inf = std::numeric_limits<double>::infinity();
    c.red = {inf, inf, inf};
    for (const auto& p : parts) {
      c.red.min_mean_curv = std::min(c.red.min_mean_curv, p.min_mean_curv);
      c.red.min_spacing_sq = std::min(c.red.min_spacing_sq, p.min_spacing_sq);
      c.red.min_area_ratio = std::min(c.red.min_area_ratio, p.min_area_ratio);
    }
    if (!(c.red.min_area_ratio > 0.0) || !(c.red.min_mean_curv > 0.0)) {
      throw NumericalError("leaf geometry degenerate (area ratio or H0 not positive)", rho);
    }
  }

  // out = v + d_rho * rate(v), or its average with `blend` when given.
  Reduction step(const LeafCoeffs& c, const std::vector<double>& v, double d_rho, const std::vector<double>* blend,
                 std::vector<double>& out) {
    const int nt = grid_.n_theta(), np = grid_.n_psi();
    for (int k = 0; k < np; ++k) {
      north_[static_cast<std::size_t>(k)] = v[grid_.index(0, grid_.antipodal_column(k))];
      south_[static_cast<std::size_t>(k)] = v[grid_.index(nt - 1, grid_.antipodal_column(k))];
    }
    const kernels::GridShape shape{nt, np, grid_.d_theta(), grid_.d_psi()};
    const kernels::LaplacianCoeffs lc{c.att, c.atp, c.app, c.lap_scale};
    const std::span<const double> bl = blend ? std::span<const double>(*blend) : std::span<const double>();
    std::vector<kernels::StepReduction> parts(static_cast<std::size_t>(chunks_));
    pool_.run(chunks_, [&](int ch) {
      const auto [r0, r1] = chunk_range(static_cast<std::size_t>(nt), chunks_, ch);
      parts[static_cast<std::size_t>(ch)] = kernels::qs_step_rows(shape, v, {north_, south_}, lc, c.reac_rate, d_rho,
                                                                  bl, out, static_cast<int>(r0), static_cast<int>(r1));
    });
    Reduction r;
    for (const auto& p : parts) r.merge(p);
    return r;
  }

 private:
  SphereGrid grid_;
  double kappa_;
  MetricField g_, h_;
  WorkerPool& pool_;
  int chunks_;
  std::vector<double> north_, south_;
  std::vector<double> tr_s_, det_s_, isg0_;
};

[[noreturn]] void fail_step(const std::vector<double>& v, double rho) {
  for (double x : v)
    if (!std::isfinite(x)) throw NumericalError("non-finite values in u", rho);
  throw NumericalError("stability violated; reduce cfl", rho);
}

std::vector<double> sample_grid(double rho_max, double every) {
  std::vector<double> t;
  const double eps = 1e-9 * every;
  for (long n = 0;; ++n) {
    const double r = static_cast<double>(n) * every;
    if (r >= rho_max - eps) break;
    t.push_back(r);
  }
  t.push_back(rho_max);
  return t;
}

}  // namespace

FlowResult run_flow(std::shared_ptr<const EmbeddedSurface> s, const BoundaryData& bd, const FlowControls& ctl,
                    WorkerPool* pool) {
  if (!s) throw DomainError("run_flow requires a surface");
  if (!(ctl.rho_max > 0.0)) throw DomainError("rho_max must be positive");
  if (!(ctl.cfl > 0.0 && ctl.cfl <= 1.0)) throw DomainError("cfl must lie in (0, 1]");
  if (!(ctl.sample_every > 0.0)) throw DomainError("sample_every must be positive");

  std::unique_ptr<WorkerPool> own;
  if (!pool) {
    own = std::make_unique<WorkerPool>(configured_workers());
    pool = own.get();
  }
  const double kappa = s->kappa;
  const double max_step = ctl.max_step > 0.0 ? ctl.max_step : 1e-3 / kappa;
  const std::size_t n = s->grid.size();

  FlowResult res;
  res.surface = s;
  res.controls = ctl;
  res.radii = radii_and_alpha(*s);
  res.alpha = ctl.alpha_override.value_or(res.radii.alpha);

  // v = H0/H - 1 = (H0 - H)/H, exact for H = H0.
  const ScalarField u0 = initial_u(*s, bd);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = (s->H0[i] - bd.H[i]) / bd.H[i];
  const auto [lo, hi] = std::minmax_element(u0.values.begin(), u0.values.end());
  res.u0_min = *lo;
  res.u0_max = *hi;
  const double bracket_lo = std::min(1.0, res.u0_min) - ctl.max_principle_tol;
  const double bracket_hi = std::max(1.0, res.u0_max) + ctl.max_principle_tol;

  auto audit = [&](double min_u, double max_u) {
    const double excursion = std::max(bracket_lo - min_u, max_u - bracket_hi);
    if (excursion > 0.0) {
      res.max_principle_ok = false;
      res.max_principle_violation = std::max(res.max_principle_violation, excursion);
    }
  };

  auto record = [&](double rho) {
    FlowSample smp;
    smp.rho = rho;
    smp.v = ScalarField(v);
    const auto [a, b] = std::minmax_element(v.begin(), v.end());
    smp.min_u = 1.0 + *a;
    smp.max_u = 1.0 + *b;
    audit(smp.min_u, smp.max_u);
    const FoliationLeaf leaf = leaf_at(*s, rho);
    smp.mass = mass_vector_from_excess(leaf, smp.v, res.alpha).vec;
    if (ctl.leaf_bounds) smp.bounds = check_leaf_bounds(leaf, res.radii.R1, res.radii.R2, res.radii.mu, ctl.bounds_tol);
    res.samples.push_back(std::move(smp));
  };

  Solver solver(*s, *pool);
  LeafCoeffs c0(n), c1(n);
  std::vector<double> v1(n);
  solver.coeffs_at(0.0, c0);
  double max_u_sq = 0.0;
  for (double x : v) max_u_sq = std::max(max_u_sq, (1.0 + x) * (1.0 + x));

  double rho = 0.0;
  res.min_step = std::numeric_limits<double>::infinity();
  const auto targets = sample_grid(ctl.rho_max, ctl.sample_every);
  record(0.0);
  for (std::size_t t = 1; t < targets.size(); ++t) {
    const double target = targets[t];
    while (rho < target) {
      double d = ctl.cfl * (2.0 * c0.red.min_mean_curv) * c0.red.min_spacing_sq / (2.0 * max_u_sq);
      d = std::min(d, max_step);
      if (!(d > 0.0) || !std::isfinite(d)) throw NumericalError("step size collapsed", rho);
      double next = rho + d;
      if (next >= target - 1e-12 * std::max(1.0, target)) {
        next = target;
        d = target - rho;
      }
      res.min_step = std::min(res.min_step, d);

      Reduction r = solver.step(c0, v, d, nullptr, v1);
      if (!r.ok) fail_step(v1, next);
      solver.coeffs_at(next, c1);
      if (ctl.scheme == TimeScheme::heun) {
        // Corrector: v <- (v + v1 + d rate(v1)) / 2, written over v once v1 is formed.
        r = solver.step(c1, v1, d, &v, v);
        if (!r.ok) fail_step(v, next);
      } else {
        v.swap(v1);
      }
      std::swap(c0, c1);
      max_u_sq = r.max_u_sq;
      audit(r.min_u, std::sqrt(r.max_u_sq));
      rho = next;
      ++res.steps;
    }
    record(target);
  }
  return res;
}

}  // namespace hypermass
