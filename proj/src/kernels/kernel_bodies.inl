// Kernel bodies templated on a lane type.  Included inside an anonymous
// namespace by scalar.cpp and avx2.cpp; do not include elsewhere.

// Flux through the theta-face between rows a (north) and b (south) at column c,
// with psi-neighbours m and p, already divided by d_theta.  Coefficients enter as
// sums, so w_tt and w_tp also carry the averaging half.
template <class L>
inline typename L::V theta_flux(const double* fa, const double* fb, const double* att_a, const double* att_b,
                                const double* atp_a, const double* atp_b, int m, int c, int p, double w_tt,
                                double w_tp) {
  using V = typename L::V;
  const V att = L::load(att_a + c) + L::load(att_b + c);
  const V atp = L::load(atp_a + c) + L::load(atp_b + c);
  const V dth = (L::load(fb + c) - L::load(fa + c)) * w_tt;
  const V dps = ((L::load(fa + p) - L::load(fa + m)) + (L::load(fb + p) - L::load(fb + m))) * w_tp;
  return att * dth + atp * dps;
}

struct PsiRow {
  const double* fm;  // row j-1 (or north ghost)
  const double* f0;
  const double* fp;  // row j+1 (or south ghost)
  const double* app;
  const double* atp;
};

// Flux through the psi-face between columns a (west) and b (east) in one row, over d_psi.
template <class L>
inline typename L::V psi_flux(const PsiRow& r, int a, int b, double w_pp, double w_tp) {
  using V = typename L::V;
  const V app = L::load(r.app + a) + L::load(r.app + b);
  const V apt = L::load(r.atp + a) + L::load(r.atp + b);
  const V dps = (L::load(r.f0 + b) - L::load(r.f0 + a)) * w_pp;
  const V dth = ((L::load(r.fp + a) - L::load(r.fm + a)) + (L::load(r.fp + b) - L::load(r.fm + b))) * w_tp;
  return app * dps + apt * dth;
}

// out[c] = flux through the face between rows a and b at column c.
template <class L>
void theta_face_row(const double* fa, const double* fb, const double* att_a, const double* att_b, const double* atp_a,
                    const double* atp_b, int np, double w_tt, double w_tp, double* out) {
  using S = lanes::ScalarLanes;
  S::store(out, theta_flux<S>(fa, fb, att_a, att_b, atp_a, atp_b, np - 1, 0, 1, w_tt, w_tp));
  int c = 1;
  for (; c + L::width + 1 <= np; c += L::width)
    L::store(out + c, theta_flux<L>(fa, fb, att_a, att_b, atp_a, atp_b, c - 1, c, c + 1, w_tt, w_tp));
  for (; c < np; ++c)
    S::store(out + c, theta_flux<S>(fa, fb, att_a, att_b, atp_a, atp_b, c - 1, c, (c + 1) % np, w_tt, w_tp));
}

// out[k] = flux through the face between columns k and k+1 (periodic).
template <class L>
void psi_face_row(const PsiRow& r, int np, double w_pp, double w_tp, double* out) {
  using S = lanes::ScalarLanes;
  int k = 0;
  for (; k + L::width + 1 <= np; k += L::width) L::store(out + k, psi_flux<L>(r, k, k + 1, w_pp, w_tp));
  for (; k < np; ++k) S::store(out + k, psi_flux<S>(r, k, (k + 1) % np, w_pp, w_tp));
}

template <class L>
inline typename L::V lap_combine(const double* fn, const double* fs, const double* fpsi, const double* isg, int k,
                                 int kw) {
  using V = typename L::V;
  const V div = (L::load(fs + k) - L::load(fn + k)) + (L::load(fpsi + k) - L::load(fpsi + kw));
  return L::load(isg + k) * div;
}

// Each face flux is evaluated once and shared by the two cells it separates.
// emit(M{}, i, value) receives the scaled divergence at node i, M.width nodes at a time.
template <class L, class Emit>
void divergence_rows(const GridShape& shape, std::span<const double> f, const PoleGhosts& ghosts,
                     const LaplacianCoeffs& co, int row_begin, int row_end, Emit&& emit) {
  using S = lanes::ScalarLanes;
  const int nt = shape.n_theta;
  const int np = shape.n_psi;
  const double w_tt = 0.5 / (shape.d_theta * shape.d_theta);
  const double w_pp = 0.5 / (shape.d_psi * shape.d_psi);
  const double w_tp = 0.125 / (shape.d_theta * shape.d_psi);
  auto row = [np](std::span<const double> a, int j) { return a.data() + static_cast<std::ptrdiff_t>(j) * np; };
  const std::size_t w = static_cast<std::size_t>(np);
  std::vector<double> buf(3 * w);
  double* fn = buf.data();
  double* fs = fn + w;
  double* fpsi = fs + w;

  auto south_faces = [&](int j, double* dst) {
    if (j < nt - 1) {
      theta_face_row<L>(row(f, j), row(f, j + 1), row(co.a_tt, j), row(co.a_tt, j + 1), row(co.a_tp, j),
                        row(co.a_tp, j + 1), np, w_tt, w_tp, dst);
    } else {
      std::fill(dst, dst + np, 0.0);
    }
  };
  if (row_begin > 0) south_faces(row_begin - 1, fn);
  else std::fill(fn, fn + np, 0.0);

  for (int j = row_begin; j < row_end; ++j) {
    south_faces(j, fs);
    const PsiRow pr{j > 0 ? row(f, j - 1) : ghosts.north.data(), row(f, j),
                    j < nt - 1 ? row(f, j + 1) : ghosts.south.data(), row(co.a_pp, j), row(co.a_tp, j)};
    psi_face_row<L>(pr, np, w_pp, w_tp, fpsi);
    const double* isg = row(co.inv_sqrt_g, j);
    const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(j) * np;
    emit(S{}, base, lap_combine<S>(fn, fs, fpsi, isg, 0, np - 1));
    int k = 1;
    for (; k + L::width <= np; k += L::width) emit(L{}, base + k, lap_combine<L>(fn, fs, fpsi, isg, k, k - 1));
    for (; k < np; ++k) emit(S{}, base + k, lap_combine<S>(fn, fs, fpsi, isg, k, k - 1));
    std::swap(fn, fs);
  }
}

template <class L>
void laplacian_rows_impl(const GridShape& shape, std::span<const double> f, const PoleGhosts& ghosts,
                         const LaplacianCoeffs& co, std::span<double> out, int row_begin, int row_end) {
  double* o = out.data();
  divergence_rows<L>(shape, f, ghosts, co, row_begin, row_end,
                     [o]<class M>(M, std::ptrdiff_t i, typename M::V x) { M::store(o + i, x); });
}

template <class L>
inline void leaf_node(const LeafBasis& b, const LeafScalars& s, const LeafCoeffsOut& o, std::size_t i,
                      typename L::V& min_h, typename L::V& min_sp, typename L::V& min_p) {
  using V = typename L::V;
  const V tr = L::load(b.tr_s.data() + i), dt = L::load(b.det_s.data() + i);
  // g / c^2 = (1 - t^2 det/k^2) g0 + (t/k)(2 + t tr/k) h0
  const V bt = tr * s.tk, ad = dt * s.tk2;
  const V cg = 1.0 - ad, ch = (bt + 2.0) * s.tk;
  const V gtt = L::load(b.g_tt.data() + i) * cg + L::load(b.h_tt.data() + i) * ch;
  const V gtp = L::load(b.g_tp.data() + i) * cg + L::load(b.h_tp.data() + i) * ch;
  const V gpp = L::load(b.g_pp.data() + i) * cg + L::load(b.h_pp.data() + i) * ch;

  // p = det A, n = tr(adj(A) B), db = det B, all over c^2
  const V p = (bt + 1.0) + ad;
  const V n = (tr * s.one_t2 + dt * s.two_tk) + s.two_kt;
  const V db = (tr * s.kt + dt) + s.k2t2;

  // One division serves 1/p, H0 = n/p and 1/n.
  const V z = 1.0 / (p * n);
  const V inv_p = z * n;
  const V inv_n = z * p;
  const V mean = n * inv_p;
  const V isg = L::load(b.inv_sqrt_g.data() + i);
  const V rs = isg * inv_p;
  L::store(o.a_tt.data() + i, gpp * rs);
  L::store(o.a_tp.data() + i, L::neg(gtp * rs));
  L::store(o.a_pp.data() + i, gtt * rs);
  L::store(o.lap_scale.data() + i, (isg * inv_n) * s.inv_c2);
  // (R + 6k^2) / (2 H0) = (det B + 2 k^2 det A) / n
  L::store(o.reac_rate.data() + i, (db + p * s.two_k2) * inv_n);

  min_h = L::vmin(min_h, mean);
  min_sp = L::vmin(min_sp, L::vmin(gtt * s.d_theta_sq, gpp * s.d_psi_sq));
  min_p = L::vmin(min_p, p);
}

template <class L>
LeafReduction leaf_coefficients_impl(const LeafBasis& b, const LeafScalars& s, const LeafCoeffsOut& o,
                                     std::size_t begin, std::size_t end) {
  using S = lanes::ScalarLanes;
  constexpr double inf = std::numeric_limits<double>::infinity();
  typename L::V mh = L::set1(inf), ms = L::set1(inf), md = L::set1(inf);
  std::size_t i = begin;
  // Local copies cannot alias the outputs, so pointers and scalars stay in registers.
  const LeafBasis lb = b;
  const LeafScalars ls = s;
  const LeafCoeffsOut lo = o;
  for (; i + L::width <= end; i += L::width) leaf_node<L>(lb, ls, lo, i, mh, ms, md);
  double sh = L::hmin(mh), ss = L::hmin(ms), sd = L::hmin(md);
  for (; i < end; ++i) leaf_node<S>(lb, ls, lo, i, sh, ss, sd);
  // rescaling commutes with the minimum
  return {sh, ss * ls.c2, sd * ls.c2};
}

// Running extremes of u and the positivity flag, kept per lane width and merged at the end.
template <class L>
struct StepAccum {
  using S = lanes::ScalarLanes;
  typename L::V max_usq = L::set1(-std::numeric_limits<double>::infinity());
  typename L::V min_u = L::set1(std::numeric_limits<double>::infinity());
  double max_usq_s = -std::numeric_limits<double>::infinity();
  double min_u_s = std::numeric_limits<double>::infinity();
  bool bad = false;

  template <class M>
  void add(typename M::V un) {
    const typename M::V usq = un * un;
    if constexpr (M::width == L::width) {
      max_usq = L::vmax(max_usq, usq);
      min_u = L::vmin(min_u, un);
    } else {
      max_usq_s = S::vmax(max_usq_s, usq);
      min_u_s = S::vmin(min_u_s, un);
    }
    bad = bad || M::any_bad(un, usq);
  }

  StepReduction result() const {
    return {S::vmax(max_usq_s, L::hmax(max_usq)), S::vmin(min_u_s, L::hmin(min_u)), !bad};
  }
};

template <class L>
StepReduction qs_step_rows_impl(const GridShape& shape, std::span<const double> v, const PoleGhosts& ghosts,
                                const LaplacianCoeffs& co, std::span<const double> reac_rate, double d_rho,
                                std::span<const double> blend, std::span<double> v_out, int row_begin, int row_end) {
  StepAccum<L> acc;
  const double* pv = v.data();
  const double* rr = reac_rate.data();
  const double* bl = blend.empty() ? nullptr : blend.data();
  double* po = v_out.data();
  divergence_rows<L>(shape, v, ghosts, co, row_begin, row_end,
                     [&]<class M>(M, std::ptrdiff_t i, typename M::V lap) {
                       using V = typename M::V;
                       const V vi = M::load(pv + i);
                       const V u = vi + 1.0;
                       const V rate = (u * u) * lap - ((vi * u) * (vi + 2.0)) * M::load(rr + i);
                       V vn = vi + rate * d_rho;
                       if (bl) vn = (M::load(bl + i) + vn) * 0.5;
                       M::store(po + i, vn);
                       acc.template add<M>(vn + 1.0);
                     });
  return acc.result();
}
