#pragma once

// Backend entry points; same signatures as the dispatched API.

#include "hypermass/kernels.hpp"

#define HYPERMASS_DECLARE_KERNELS(ns)                                                                             \
  namespace hypermass::kernels::ns {                                                                              \
  void laplacian_rows(const GridShape&, std::span<const double>, const PoleGhosts&, const LaplacianCoeffs&,      \
                      std::span<double>, int, int);                                                               \
  LeafReduction leaf_coefficients(const LeafBasis&, const LeafScalars&, const LeafCoeffsOut&, std::size_t,       \
                                  std::size_t);                                                                   \
  StepReduction qs_step_rows(const GridShape&, std::span<const double>, const PoleGhosts&, const LaplacianCoeffs&, \
                             std::span<const double>, double, std::span<const double>, std::span<double>, int, int); \
  }

HYPERMASS_DECLARE_KERNELS(scalar)
HYPERMASS_DECLARE_KERNELS(avx2)
