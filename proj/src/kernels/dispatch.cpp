#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "hypermass/kernels.hpp"
#include "variants.hpp"

namespace hypermass::kernels {
namespace {

Backend detect() {
  if (const char* env = std::getenv("HYPERMASS_SIMD")) {
    if (std::string(env) == "scalar") return Backend::scalar;
  }
  return avx2_available() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{detect()};
  return b;
}

}  // namespace

std::string_view to_string(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(HYPERMASS_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_available()) throw std::invalid_argument("AVX2 backend not available on this CPU");
  current().store(b, std::memory_order_relaxed);
}

LeafScalars LeafScalars::at(double rho, double kappa, double d_theta, double d_psi) {
  const double c = std::cosh(kappa * rho);
  const double t = std::tanh(kappa * rho);
  const double tk = t / kappa;
  return {tk,          tk * tk,       1.0 + t * t,     2.0 * tk,         2.0 * kappa * t,   kappa * t,
          kappa * kappa * t * t,      2.0 * kappa * kappa, c * c,        1.0 / (c * c),     d_theta * d_theta,
          d_psi * d_psi};
}

#if defined(HYPERMASS_HAVE_AVX2)
#define HM_DISPATCH(fn, ...) \
  (active_backend() == Backend::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define HM_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void laplacian_rows(const GridShape& shape, std::span<const double> f, const PoleGhosts& ghosts,
                    const LaplacianCoeffs& coeffs, std::span<double> out, int row_begin, int row_end) {
  HM_DISPATCH(laplacian_rows, shape, f, ghosts, coeffs, out, row_begin, row_end);
}

LeafReduction leaf_coefficients(const LeafBasis& basis, const LeafScalars& sc, const LeafCoeffsOut& out,
                                std::size_t begin, std::size_t end) {
  return HM_DISPATCH(leaf_coefficients, basis, sc, out, begin, end);
}

StepReduction qs_step_rows(const GridShape& shape, std::span<const double> v, const PoleGhosts& ghosts,
                           const LaplacianCoeffs& coeffs, std::span<const double> reac_rate, double d_rho,
                           std::span<const double> blend, std::span<double> v_out, int row_begin, int row_end) {
  return HM_DISPATCH(qs_step_rows, shape, v, ghosts, coeffs, reac_rate, d_rho, blend, v_out, row_begin, row_end);
}

}  // namespace hypermass::kernels
