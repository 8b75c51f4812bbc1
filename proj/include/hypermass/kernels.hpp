#pragma once

// Data-parallel inner loops of the quasi-spherical flow.  Every kernel has a
// scalar reference implementation and an AVX2 variant; the variant is chosen
// once at startup from the CPU features (override with HYPERMASS_SIMD=scalar).
//
// Both variants are instantiated from one templated body so they perform the
// same IEEE operations in the same order: results are bit-identical.

#include <cstddef>
#include <span>
#include <string_view>

namespace hypermass::kernels {

enum class Backend { scalar, avx2 };

std::string_view to_string(Backend b);
bool avx2_available();
Backend active_backend();
/// Throws std::invalid_argument when the requested backend is unavailable.
void set_backend(Backend b);

struct GridShape {
  int n_theta;
  int n_psi;
  double d_theta;
  double d_psi;
};

/// Densitized inverse metric sqrt(g) g^{ab} and 1/sqrt(g) per node.
struct LaplacianCoeffs {
  std::span<const double> a_tt;
  std::span<const double> a_tp;
  std::span<const double> a_pp;
  std::span<const double> inv_sqrt_g;
};

/// f values across the poles: ghost_north[k] = f(0, k + n_psi/2),
/// ghost_south[k] = f(n_theta - 1, k + n_psi/2).
struct PoleGhosts {
  std::span<const double> north;
  std::span<const double> south;
};

void laplacian_rows(const GridShape& shape, std::span<const double> f, const PoleGhosts& ghosts,
                    const LaplacianCoeffs& coeffs, std::span<double> out, int row_begin, int row_end);

/// Per-node basis of the closed-form parallel-surface geometry:
///   g(rho) = c^2 g + (2cs/k) h + (s^2/k^2) q,    q = h g^{-1} h = tr(S) h - det(S) g,
/// with c = cosh(k rho), s = sinh(k rho), S = g^-1 h.
struct LeafBasis {
  std::span<const double> g_tt, g_tp, g_pp;
  std::span<const double> h_tt, h_tp, h_pp;
  std::span<const double> tr_s, det_s;      // trace and determinant of S
  std::span<const double> inv_sqrt_g;       // 1 / sqrt(det g) of the base surface
};

// With A = cI + (s/k)S and B = k s I + c S the leaf has g = g0 A^2 and shape
// operator A^-1 B, so everything below is a polynomial in tr S and det S.
// The kernel works with g / c^2, det A / c^2 and so on (t = tanh(k rho));
// the common factor cancels in every coefficient except lap_scale.
struct LeafScalars {
  double tk;       // t / k
  double tk2;      // t^2 / k^2
  double one_t2;   // 1 + t^2
  double two_tk;   // 2 t / k
  double two_kt;   // 2 k t
  double kt;       // k t
  double k2t2;     // k^2 t^2
  double two_k2;   // 2 k^2
  double c2;       // c^2
  double inv_c2;   // 1 / c^2
  double d_theta_sq;
  double d_psi_sq;

  static LeafScalars at(double rho, double kappa, double d_theta, double d_psi);
};

struct LeafCoeffsOut {
  std::span<double> a_tt, a_tp, a_pp;  // sqrt(g) g^{ab} of the leaf
  std::span<double> lap_scale;         // 1 / (H0 sqrt(g))
  std::span<double> reac_rate;         // (R^rho + 6 kappa^2) / (2 H0)
};

struct LeafReduction {
  double min_mean_curv;
  double min_spacing_sq;  // min over nodes of g_tt dtheta^2 and g_pp dpsi^2
  double min_area_ratio;  // min of sqrt(det g_rho / det g0); zero or less means a focal point
};

LeafReduction leaf_coefficients(const LeafBasis& basis, const LeafScalars& sc, const LeafCoeffsOut& out,
                                std::size_t begin, std::size_t end);

struct StepReduction {
  double max_u_sq;
  double min_u;
  bool finite_positive;
};

/// Explicit step of v = u - 1 on rows [row_begin, row_end), Laplacian fused in:
///   w = v + d_rho [u^2 lap_scale div(A grad v) - v u (v + 2) reac_rate]
/// with A and lap_scale passed as a_* and inv_sqrt_g of `coeffs`.  v_out is w,
/// or 0.5 (blend + w) when blend is non-empty.  v_out must not alias v; it may
/// alias blend.
StepReduction qs_step_rows(const GridShape& shape, std::span<const double> v, const PoleGhosts& ghosts,
                           const LaplacianCoeffs& coeffs, std::span<const double> reac_rate, double d_rho,
                           std::span<const double> blend, std::span<double> v_out, int row_begin, int row_end);

}  // namespace hypermass::kernels
