#pragma once

// Minimal lane abstraction shared by the kernel bodies.  ScalarLanes works on
// one double; Avx2Lanes on four.  Only correctly rounded IEEE operations are
// exposed so that both produce identical bits per lane.

#include <cmath>
#include <limits>

#if defined(HYPERMASS_BUILD_AVX2)
#include <immintrin.h>
#endif

namespace hypermass::kernels::lanes {

struct ScalarLanes {
  using V = double;
  static constexpr int width = 1;

  static V load(const double* p) { return *p; }
  static void store(double* p, V v) { *p = v; }
  static V set1(double x) { return x; }
  static V sqrt(V x) { return std::sqrt(x); }
  static V neg(V x) { return -x; }
  static double hmin(V x) { return x; }
  static double hmax(V x) { return x; }
  static V vmin(V a, V b) { return b < a ? b : a; }
  static V vmax(V a, V b) { return b > a ? b : a; }
  /// True when some lane has u <= 0 or u^2 not finite (NaN included).
  static bool any_bad(V u, V usq) { return !(u > 0.0 && usq < std::numeric_limits<double>::max()); }
};

#if defined(HYPERMASS_BUILD_AVX2)
struct Vec4d {
  __m256d v;
  friend Vec4d operator+(Vec4d a, Vec4d b) { return {_mm256_add_pd(a.v, b.v)}; }
  friend Vec4d operator-(Vec4d a, Vec4d b) { return {_mm256_sub_pd(a.v, b.v)}; }
  friend Vec4d operator*(Vec4d a, Vec4d b) { return {_mm256_mul_pd(a.v, b.v)}; }
  friend Vec4d operator/(Vec4d a, Vec4d b) { return {_mm256_div_pd(a.v, b.v)}; }
  friend Vec4d operator+(Vec4d a, double b) { return {_mm256_add_pd(a.v, _mm256_set1_pd(b))}; }
  friend Vec4d operator+(double a, Vec4d b) { return {_mm256_add_pd(_mm256_set1_pd(a), b.v)}; }
  friend Vec4d operator-(Vec4d a, double b) { return {_mm256_sub_pd(a.v, _mm256_set1_pd(b))}; }
  friend Vec4d operator-(double a, Vec4d b) { return {_mm256_sub_pd(_mm256_set1_pd(a), b.v)}; }
  friend Vec4d operator*(Vec4d a, double b) { return {_mm256_mul_pd(a.v, _mm256_set1_pd(b))}; }
  friend Vec4d operator*(double a, Vec4d b) { return {_mm256_mul_pd(_mm256_set1_pd(a), b.v)}; }
  friend Vec4d operator/(double a, Vec4d b) { return {_mm256_div_pd(_mm256_set1_pd(a), b.v)}; }
};

struct Avx2Lanes {
  using V = Vec4d;
  static constexpr int width = 4;

  static V load(const double* p) { return {_mm256_loadu_pd(p)}; }
  static void store(double* p, V v) { _mm256_storeu_pd(p, v.v); }
  static V set1(double x) { return {_mm256_set1_pd(x)}; }
  static V sqrt(V x) { return {_mm256_sqrt_pd(x.v)}; }
  static V neg(V x) { return {_mm256_xor_pd(x.v, _mm256_set1_pd(-0.0))}; }
  // Operand order mirrors ScalarLanes::vmin/vmax (returns a unless b is strictly smaller/larger).
  static V vmin(V a, V b) { return {_mm256_min_pd(b.v, a.v)}; }
  static V vmax(V a, V b) { return {_mm256_max_pd(b.v, a.v)}; }
  static double hmin(V x) {
    alignas(32) double t[4];
    _mm256_store_pd(t, x.v);
    double m = t[0];
    for (int i = 1; i < 4; ++i) m = t[i] < m ? t[i] : m;
    return m;
  }
  static double hmax(V x) {
    alignas(32) double t[4];
    _mm256_store_pd(t, x.v);
    double m = t[0];
    for (int i = 1; i < 4; ++i) m = t[i] > m ? t[i] : m;
    return m;
  }
  static bool any_bad(V u, V usq) {
    const __m256d pos = _mm256_cmp_pd(u.v, _mm256_setzero_pd(), _CMP_GT_OQ);
    const __m256d fin = _mm256_cmp_pd(usq.v, _mm256_set1_pd(std::numeric_limits<double>::max()), _CMP_LT_OQ);
    return _mm256_movemask_pd(_mm256_and_pd(pos, fin)) != 0xF;
  }
};
#endif

}  // namespace hypermass::kernels::lanes
