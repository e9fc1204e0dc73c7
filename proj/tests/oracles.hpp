#pragma once

// Slow, independent reference computations. Nothing here calls into the
// library's solvers; only plain data types are shared.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "llk/causal_space.hpp"
#include "llk/model_space.hpp"
#include "llk/warped_product.hpp"

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;

// Textbook chart formula, no cancellation tricks. Returns 0 unless q is in
// the timelike future of p.
inline double tau(llk::AdsPoint p, llk::AdsPoint q) {
  if (!(q.t > p.t)) return 0.0;
  const double arg = std::sin(p.t) * std::sin(q.t) + std::cos(p.t) * std::cos(q.t) * std::cosh(q.x - p.x);
  return arg < 1.0 ? std::acos(std::max(arg, -1.0)) : 0.0;
}

template <class F>
double bisect(F&& g, double lo, double hi, int iters = 200) {
  // g(lo) and g(hi) have opposite signs.
  const bool lo_neg = g(lo) < 0.0;
  for (int k = 0; k < iters; ++k) {
    const double mid = 0.5 * (lo + hi);
    if ((g(mid) < 0.0) == lo_neg) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Middle vertex of the timelike triangle with past (-a_pf/2, 0) and future
// (a_pf/2, 0), on the x >= 0 side: walk the level curve tau(past, .) = a_pm
// upwards in t until tau(., future) drops to a_mf.
inline llk::AdsPoint middle_vertex(double a_pm, double a_mf, double a_pf) {
  const llk::AdsPoint P{-0.5 * a_pf, 0.0}, F{0.5 * a_pf, 0.0};
  auto on_level = [&](double t) {
    // tau(P, (t, x)) decreases from t - P.t at x = 0 to 0 on the light cone.
    if (tau(P, {t, 0.0}) <= a_pm) return llk::AdsPoint{t, 0.0};
    const double x_null = std::asinh(std::tan(t)) - std::asinh(std::tan(P.t));
    const double x = bisect([&](double x) { return tau(P, {t, x}) - a_pm; }, 0.0, x_null);
    return llk::AdsPoint{t, x};
  };
  const double t_lo = P.t + a_pm;
  if (tau(P, F) - a_pm - a_mf <= 1e-15) return {t_lo, 0.0};
  const double t = bisect([&](double t) { return tau(on_level(t), F) - a_mf; }, t_lo, F.t);
  return on_level(t);
}

// Heaviest chain value by exhaustive search over all leq-chains from i to j.
inline double longest_chain_value(const llk::FiniteCausalSpace& X, std::size_t i, std::size_t j) {
  const std::size_t n = X.size();
  double best = -1.0;
  std::vector<char> used(n, 0);
  std::function<void(std::size_t, double)> walk = [&](std::size_t at, double acc) {
    if (at == j) best = std::max(best, acc);
    for (std::size_t k = 0; k < n; ++k) {
      if (used[k] || k == at || !X.le(at, k)) continue;
      used[k] = 1;
      walk(k, acc + X.t(at, k));
      used[k] = 0;
    }
  };
  used[i] = 1;
  walk(i, 0.0);
  return best;
}

// Piecewise-linear path maximization of the warped length over M equal time
// steps, with f frozen at each step's midpoint. The optimum keeps
// w^2 dx / sqrt(h^2 - w^2 dx^2) constant along the path; bisect that constant.
inline double path_max_tau(const std::function<double(double)>& f, double s, double t, double dx,
                           int M = 20000) {
  const double h = (t - s) / M;
  std::vector<double> w(M);
  for (int k = 0; k < M; ++k) w[k] = f(s + (k + 0.5) * h);
  auto offset = [&](double c) {
    double x = 0.0;
    for (double wk : w) x += h * c / (wk * std::sqrt(wk * wk + c * c));
    return x;
  };
  if (dx == 0.0) return t - s;
  double hi = 1.0;
  while (offset(hi) < dx) hi *= 2.0;
  const double c = bisect([&](double c) { return offset(c) - dx; }, 0.0, hi);
  double L = 0.0;
  for (double wk : w) L += h * wk / std::sqrt(wk * wk + c * c);
  return L;
}

// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& g, double a, double b, double tol) {
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int depth) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = g(lm), frm = g(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (depth > 40 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
        return rec(lo, mid, flo, flm, fmid, left, depth + 1) + rec(mid, hi, fmid, frm, fhi, right, depth + 1);
      };
  const double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), 0);
}

// Residual of the cos-warped geodesic equations
//   t'' = cos t sin t x'^2,   x'' = 2 tan t t' x'
// by central differences with step h, Richardson-combined with step 2h.
inline double geodesic_residual(const std::function<llk::AdsPoint(double)>& curve, double lambda, double h) {
  const llk::AdsPoint m2 = curve(lambda - 2 * h), m1 = curve(lambda - h), b = curve(lambda);
  const llk::AdsPoint p1 = curve(lambda + h), p2 = curve(lambda + 2 * h);
  auto d1 = [&](double a2, double a1, double c1, double c2) {
    return (4.0 * (c1 - a1) / (2 * h) - (c2 - a2) / (4 * h)) / 3.0;
  };
  auto d2 = [&](double a2, double a1, double mid, double c1, double c2) {
    return (4.0 * (c1 - 2 * mid + a1) / (h * h) - (c2 - 2 * mid + a2) / (4 * h * h)) / 3.0;
  };
  const double tp = d1(m2.t, m1.t, p1.t, p2.t), xp = d1(m2.x, m1.x, p1.x, p2.x);
  const double tpp = d2(m2.t, m1.t, b.t, p1.t, p2.t), xpp = d2(m2.x, m1.x, b.x, p1.x, p2.x);
  const double r1 = tpp - std::cos(b.t) * std::sin(b.t) * xp * xp;
  const double r2 = xpp - 2.0 * std::tan(b.t) * tp * xp;
  return std::max(std::abs(r1), std::abs(r2));
}

// Ambient unit tangent at lambda by central differences.
inline llk::AmbientPoint tangent(const std::function<llk::AdsPoint(double)>& curve, double lambda,
                                 double h = 1e-6) {
  auto emb = [](llk::AdsPoint p) {
    return llk::AmbientPoint{std::sin(p.t), std::cos(p.t) * std::cosh(p.x), std::cos(p.t) * std::sinh(p.x)};
  };
  const llk::AmbientPoint a = emb(curve(lambda - h)), c = emb(curve(lambda + h));
  llk::AmbientPoint v{(c.s1 - a.s1) / (2 * h), (c.s2 - a.s2) / (2 * h), (c.z - a.z) / (2 * h)};
  const double n = std::sqrt(v.s1 * v.s1 + v.s2 * v.s2 - v.z * v.z);
  return {v.s1 / n, v.s2 / n, v.z / n};
}

inline double rapidity_between(llk::AmbientPoint u, llk::AmbientPoint v) {
  const double b = u.s1 * v.s1 + u.s2 * v.s2 - u.z * v.z;
  return std::acosh(std::max(1.0, std::abs(b)));
}

// Riemannian hyperbolic law of cosines: angle opposite side c.
inline double hyperbolic_angle(double a, double b, double c) {
  const double arg = (std::cosh(a) * std::cosh(b) - std::cosh(c)) / (std::sinh(a) * std::sinh(b));
  return std::acos(std::clamp(arg, -1.0, 1.0));
}

}  // namespace oracle
