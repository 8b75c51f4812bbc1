#include <algorithm>
#include <cstddef>
#include <vector>
#include <limits>

#include "hypermass/kernels.hpp"
#include "lanes.hpp"
#include "variants.hpp"

namespace hypermass::kernels::scalar {
namespace {
#include "kernel_bodies.inl"
}  // namespace

void laplacian_rows(const GridShape& shape, std::span<const double> f, const PoleGhosts& ghosts,
                    const LaplacianCoeffs& coeffs, std::span<double> out, int row_begin, int row_end) {
  laplacian_rows_impl<lanes::ScalarLanes>(shape, f, ghosts, coeffs, out, row_begin, row_end);
}

LeafReduction leaf_coefficients(const LeafBasis& basis, const LeafScalars& sc, const LeafCoeffsOut& out,
                                std::size_t begin, std::size_t end) {
  return leaf_coefficients_impl<lanes::ScalarLanes>(basis, sc, out, begin, end);
}

StepReduction qs_step_rows(const GridShape& shape, std::span<const double> v, const PoleGhosts& ghosts,
                           const LaplacianCoeffs& coeffs, std::span<const double> reac_rate, double d_rho,
                           std::span<const double> blend, std::span<double> v_out, int row_begin, int row_end) {
  return qs_step_rows_impl<lanes::ScalarLanes>(shape, v, ghosts, coeffs, reac_rate, d_rho, blend, v_out, row_begin,
                                           row_end);
}

}  // namespace hypermass::kernels::scalar
