#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "hypermass/foliation.hpp"
#include "hypermass/kernels.hpp"
#include "hypermass/qs_flow.hpp"

using namespace hypermass;
namespace kn = hypermass::kernels;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

struct BackendGuard {
  kn::Backend saved = kn::active_backend();
  ~BackendGuard() { kn::set_backend(saved); }
};

// Per-node inputs taken from a real perturbed surface so every code path sees
// realistic magnitudes.
struct Inputs {
  SphereGrid grid;
  kn::GridShape shape;
  std::vector<double> gtt, gtp, gpp, htt, htp, hpp, tr, dt, isg;
  std::vector<double> v, a_tt, a_tp, a_pp, scale, reac, blend;

  Inputs(int nt, int np, unsigned seed) : grid(nt, np) {
    shape = {nt, np, grid.d_theta(), grid.d_psi()};
    const EmbeddedSurface s = build_surface(RadialSpec::harmonic(1.0, 1.0, {{2, 0, 0.05}, {3, 1, 0.02}}), grid);
    gtt = s.g.tt; gtp = s.g.tp; gpp = s.g.pp;
    htt = s.h.tt; htp = s.h.tp; hpp = s.h.pp;
    const std::size_t n = grid.size();
    tr.resize(n); dt.resize(n); isg.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double det = s.g.det(i);
      tr[i] = (gpp[i] * htt[i] - 2.0 * gtp[i] * htp[i] + gtt[i] * hpp[i]) / det;
      dt[i] = s.h.det(i) / det;
      isg[i] = 1.0 / std::sqrt(det);
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-0.4, 0.6), pos(0.5, 2.0);
    v.resize(n); blend.resize(n);
    a_tt.resize(n); a_tp.resize(n); a_pp.resize(n); scale.resize(n); reac.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = d(rng);
      blend[i] = d(rng);
      a_pp[i] = pos(rng);
      a_tt[i] = pos(rng);
      a_tp[i] = 0.2 * d(rng);
      scale[i] = pos(rng);
      reac[i] = pos(rng);
    }
  }

  kn::LeafBasis basis() const {
    return {gtt, gtp, gpp, htt, htp, hpp, tr, dt, isg};
  }
  kn::LaplacianCoeffs coeffs() const { return {a_tt, a_tp, a_pp, scale}; }
  std::vector<double> ghost(const std::vector<double>& f, int row) const {
    std::vector<double> g(static_cast<std::size_t>(shape.n_psi));
    for (int k = 0; k < shape.n_psi; ++k) g[static_cast<std::size_t>(k)] = f[grid.index(row, grid.antipodal_column(k))];
    return g;
  }
};

std::vector<double> run_laplacian(const Inputs& in, int rb, int re) {
  std::vector<double> out(in.grid.size(), -7.0);
  const auto gn = in.ghost(in.v, 0), gs = in.ghost(in.v, in.shape.n_theta - 1);
  kn::laplacian_rows(in.shape, in.v, {gn, gs}, in.coeffs(), out, rb, re);
  return out;
}

struct LeafOut {
  std::vector<double> att, atp, app, scale, reac;
  kn::LeafReduction red;
};

LeafOut run_leaf(const Inputs& in, double rho, std::size_t b, std::size_t e) {
  const std::size_t n = in.grid.size();
  LeafOut o{std::vector<double>(n, -1.0), std::vector<double>(n, -1.0), std::vector<double>(n, -1.0),
            std::vector<double>(n, -1.0), std::vector<double>(n, -1.0), {}};
  const auto sc = kn::LeafScalars::at(rho, 1.0, in.grid.d_theta(), in.grid.d_psi());
  o.red = kn::leaf_coefficients(in.basis(), sc, {o.att, o.atp, o.app, o.scale, o.reac}, b, e);
  return o;
}

struct StepOut {
  std::vector<double> out;
  kn::StepReduction red;
};

StepOut run_step(const Inputs& in, bool heun, int rb, int re) {
  StepOut o{heun ? in.blend : std::vector<double>(in.grid.size(), -3.0), {}};
  const auto gn = in.ghost(in.v, 0), gs = in.ghost(in.v, in.shape.n_theta - 1);
  std::span<const double> bl;
  if (heun) bl = o.out;  // in-place blend is allowed
  o.red = kn::qs_step_rows(in.shape, in.v, {gn, gs}, in.coeffs(), in.reac, 1e-3, bl, o.out, rb, re);
  return o;
}

}  // namespace

TEST_CASE("backend selection") {
  BackendGuard guard;
  CHECK(kn::to_string(kn::Backend::scalar) == "scalar");
  CHECK(kn::to_string(kn::Backend::avx2) == "avx2");
  CHECK_NOTHROW(kn::set_backend(kn::Backend::scalar));
  CHECK(kn::active_backend() == kn::Backend::scalar);
  if (!kn::avx2_available()) CHECK_THROWS_AS(kn::set_backend(kn::Backend::avx2), std::invalid_argument);
}

TEST_CASE("AVX2 kernels are bit-identical to the scalar reference") {
  if (!kn::avx2_available()) {
    MESSAGE("AVX2 not available on this machine; equivalence not exercised");
    return;
  }
  BackendGuard guard;
  // n_psi = 18 and 22 leave vector tails; rows ranges cover poles and interior chunks
  for (auto [nt, np] : {std::pair{8, 18}, std::pair{16, 32}, std::pair{12, 22}, std::pair{20, 40}}) {
    CAPTURE(nt);
    CAPTURE(np);
    const Inputs in(nt, np, static_cast<unsigned>(nt * 131 + np));
    for (auto [rb, re] : {std::pair{0, nt}, std::pair{0, 1}, std::pair{nt - 1, nt}, std::pair{2, nt / 2 + 1}}) {
      kn::set_backend(kn::Backend::scalar);
      const auto la = run_laplacian(in, rb, re);
      const auto sa = run_step(in, false, rb, re), ha = run_step(in, true, rb, re);
      kn::set_backend(kn::Backend::avx2);
      const auto lb = run_laplacian(in, rb, re);
      const auto sb = run_step(in, false, rb, re), hb = run_step(in, true, rb, re);
      CHECK(same_bits(la, lb));
      CHECK(same_bits(sa.out, sb.out));
      CHECK(same_bits(ha.out, hb.out));
      CHECK(same_bits(sa.red.max_u_sq, sb.red.max_u_sq));
      CHECK(same_bits(sa.red.min_u, sb.red.min_u));
      CHECK(sa.red.finite_positive == sb.red.finite_positive);
      CHECK(same_bits(ha.red.min_u, hb.red.min_u));
    }
    const std::size_t n = in.grid.size();
    for (double rho : {0.0, 0.37, 4.0}) {
      for (auto [b, e] : {std::pair<std::size_t, std::size_t>{0, n}, {3, n - 5}, {1, 2}}) {
        kn::set_backend(kn::Backend::scalar);
        const LeafOut a = run_leaf(in, rho, b, e);
        kn::set_backend(kn::Backend::avx2);
        const LeafOut c = run_leaf(in, rho, b, e);
        CHECK(same_bits(a.att, c.att));
        CHECK(same_bits(a.atp, c.atp));
        CHECK(same_bits(a.app, c.app));
        CHECK(same_bits(a.scale, c.scale));
        CHECK(same_bits(a.reac, c.reac));
        CHECK(same_bits(a.red.min_mean_curv, c.red.min_mean_curv));
        CHECK(same_bits(a.red.min_spacing_sq, c.red.min_spacing_sq));
        CHECK(same_bits(a.red.min_area_ratio, c.red.min_area_ratio));
      }
    }
  }
}

TEST_CASE("non-finite and non-positive updates are flagged on both backends") {
  BackendGuard guard;
  Inputs in(8, 18, 9);
  in.v[in.grid.index(3, 17)] = -1.5;  // u < 0 in the scalar tail column
  for (kn::Backend b : {kn::Backend::scalar, kn::Backend::avx2}) {
    if (b == kn::Backend::avx2 && !kn::avx2_available()) continue;
    kn::set_backend(b);
    CHECK_FALSE(run_step(in, false, 0, 8).red.finite_positive);
  }
  in.v[in.grid.index(3, 17)] = 0.1;
  in.v[in.grid.index(4, 2)] = NAN;  // inside the vector body
  for (kn::Backend b : {kn::Backend::scalar, kn::Backend::avx2}) {
    if (b == kn::Backend::avx2 && !kn::avx2_available()) continue;
    kn::set_backend(b);
    CHECK_FALSE(run_step(in, false, 0, 8).red.finite_positive);
  }
}

TEST_CASE("kernel laplacian matches the reference operator") {
  // leaf coefficients at rho = 0 turned into the plain Laplace-Beltrami of the surface metric
  const Inputs in(16, 32, 1);
  const std::size_t n = in.grid.size();
  MetricField g(n);
  g.tt = in.gtt;
  g.tp = in.gtp;
  g.pp = in.gpp;
  std::vector<double> att(n), atp(n), app(n), isg(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double sq = std::sqrt(g.det(i));
    att[i] = in.gpp[i] / sq;
    atp[i] = -in.gtp[i] / sq;
    app[i] = in.gtt[i] / sq;
    isg[i] = 1.0 / sq;
  }
  std::vector<double> out(n);
  const auto gn = in.ghost(in.v, 0), gs = in.ghost(in.v, 15);
  kn::laplacian_rows(in.shape, in.v, {gn, gs}, {att, atp, app, isg}, out, 0, 16);
  const ScalarField ref = laplace_beltrami(ScalarField(in.v), g, in.grid);
  for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == doctest::Approx(ref[i]).epsilon(1e-12).scale(1.0 + std::abs(ref[i])));
}

TEST_CASE("whole flows agree bitwise across backends") {
  if (!kn::avx2_available()) {
    MESSAGE("AVX2 not available on this machine; equivalence not exercised");
    return;
  }
  BackendGuard guard;
  const auto s = std::make_shared<EmbeddedSurface>(
      build_surface(RadialSpec::harmonic(1.0, 1.0, {{2, 0, 0.05}, {2, -1, 0.02}}), SphereGrid(12, 26)));
  BoundaryData bd{ScalarField(s->grid.size())};
  for (std::size_t i = 0; i < bd.H.size(); ++i) bd.H[i] = s->H0[i] / 1.5;
  FlowControls ctl;
  ctl.rho_max = 0.4;
  ctl.leaf_bounds = false;
  for (TimeScheme sch : {TimeScheme::heun, TimeScheme::euler}) {
    ctl.scheme = sch;
    kn::set_backend(kn::Backend::scalar);
    const FlowResult a = run_flow(s, bd, ctl);
    kn::set_backend(kn::Backend::avx2);
    const FlowResult b = run_flow(s, bd, ctl);
    REQUIRE(a.samples.size() == b.samples.size());
    CHECK(a.steps == b.steps);
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
      CHECK(same_bits(a.samples[k].v.values, b.samples[k].v.values));
      CHECK(a.samples[k].mass == b.samples[k].mass);
    }
  }
}
