#include "llk/model_space.hpp"

#include <algorithm>
#include <cmath>

#include "llk/errors.hpp"

namespace llk {

namespace {

const char* const kModule = "model_space";

double sq(double v) { return v * v; }

// arcosh(1 + u), accurate for small u.
double acosh1p(double u) { return std::log1p(u + std::sqrt(u * (u + 2.0))); }

// tau from m = 1 - cos(tau) and p = 1 + cos(tau), both computed without
// cancellation by the callers.
double tau_from_mp(double m, double p) {
  return 2.0 * std::atan2(std::sqrt(std::max(m, 0.0)), std::sqrt(std::max(p, 0.0)));
}

IntervalResult classify(double m, double p, double scale) {
  if (m < -kSlack * scale || p < -kSlack) return {Relation::unrelated, 0.0};
  if (std::abs(m) <= kSlack * scale) return {Relation::null, 0.0};
  return {Relation::timelike, tau_from_mp(m, p)};
}

IntervalResult forward_interval(AdsPoint p, AdsPoint q) {
  const double dt = q.t - p.t;
  const double dx = q.x - p.x;
  if (dt == 0.0 && dx == 0.0) return {Relation::null, 0.0};
  // 1 - arg = 2 sin^2(dt/2) - 2 cos t1 cos t2 sinh^2(dx/2)
  const double a = 2.0 * sq(std::sin(0.5 * dt));
  const double b = 2.0 * std::cos(p.t) * std::cos(q.t) * sq(std::sinh(0.5 * dx));
  const double m = a - b;
  const double pp = 2.0 * sq(std::cos(0.5 * dt)) + b;
  return classify(m, pp, a + b);
}

void require_side(double a, const char* name) {
  if (!(a > 0.0)) throw Error(ErrorCode::infeasible, kModule, std::string("zero or negative side ") + name);
  if (!(a < kPi)) throw Error(ErrorCode::size_bound, kModule, std::string("side ") + name + " >= pi");
}

// cosh(omega) - 1 for the law of cosines, in product form.
double loc_u(double a12, double a23, double a13, int sigma) {
  const double denom = std::sin(a12) * std::sin(a23);
  if (sigma > 0) {
    return 2.0 * std::sin(0.5 * (a12 + a23 + a13)) * std::sin(0.5 * (a13 - a12 - a23)) / denom;
  }
  return -2.0 * std::sin(0.5 * (a13 + a12 - a23)) * std::sin(0.5 * (a13 - a12 + a23)) / denom;
}

}  // namespace

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::timelike: return "timelike";
    case Relation::null: return "null";
    case Relation::unrelated: return "unrelated";
    case Relation::past_directed: return "past_directed";
  }
  return "unknown";
}

IntervalResult ads_interval(AdsPoint p, AdsPoint q) {
  if (p.t > q.t) {
    const IntervalResult back = forward_interval(q, p);
    if (back.causal()) return {Relation::past_directed, back.tau};
    return {Relation::unrelated, 0.0};
  }
  return forward_interval(p, q);
}

AmbientPoint embed_ads(AdsPoint p) {
  const double c = std::cos(p.t);
  return {std::sin(p.t), c * std::cosh(p.x), c * std::sinh(p.x)};
}

AdsPoint chart_point(AmbientPoint P) {
  const double c2 = (P.s2 - P.z) * (P.s2 + P.z);
  if (!(P.s2 > 0.0) || !(c2 > 0.0)) throw Error(ErrorCode::domain, kModule, "ambient point outside the AdS' patch");
  const double c = std::sqrt(c2);
  return {std::atan2(P.s1, c), std::atanh(P.z / P.s2)};
}

double bilinear(AmbientPoint P, AmbientPoint Q) { return -P.s1 * Q.s1 - P.s2 * Q.s2 + P.z * Q.z; }

IntervalResult ambient_tau(AmbientPoint P, AmbientPoint Q) {
  const AmbientPoint d = Q - P;
  const AmbientPoint s = Q + P;
  const double scale = 0.5 * (sq(d.s1) + sq(d.s2) + sq(d.z));
  if (scale == 0.0) return {Relation::null, 0.0};
  // 1 + b(P,Q) = -b(d,d)/2 and 1 - b(P,Q) = -b(s,s)/2.
  const double m = 0.5 * (sq(d.s1) + sq(d.s2) - sq(d.z));
  const double pp = 0.5 * (sq(s.s1) + sq(s.s2) - sq(s.z));
  IntervalResult r = classify(m, pp, scale);
  if (r.causal() && d.s1 < 0.0) r.relation = Relation::past_directed;
  return r;
}

double loc_side(double a12, double a23, double omega, int sigma) {
  if (!(a12 > 0.0 && a12 < kPi && a23 > 0.0 && a23 < kPi)) {
    throw Error(ErrorCode::parameter, kModule, "loc_side needs a12, a23 in (0, pi)");
  }
  const double u = 2.0 * sq(std::sinh(0.5 * omega));
  const double ss = std::sin(a12) * std::sin(a23);
  const double rhs = sigma > 0 ? std::cos(a12 + a23) - u * ss : std::cos(a12 - a23) + u * ss;
  if (rhs < -1.0 - kSlack || rhs > 1.0 + kSlack) {
    throw Error(ErrorCode::infeasible, kModule, "no AdS triangle with these sides and angle");
  }
  double c = std::acos(std::clamp(rhs, -1.0, 1.0));
  // Near-degenerate triangles: acos drops the small u term. Polish the gap to
  // the collinear side with cos c - cos ref = -+k in product form.
  const double ref = sigma > 0 ? a12 + a23 : std::abs(a12 - a23);
  const double k = u * ss;
  for (int it = 0; it < 4; ++it) {
    const double h = std::sin(0.5 * (c + ref));
    const double arg = k / (2.0 * h);
    if (!(h > 0.0) || !(arg < 0.1)) break;
    c = sigma > 0 ? ref + 2.0 * std::asin(arg) : ref - 2.0 * std::asin(arg);
  }
  return std::clamp(c, 0.0, kPi);
}

double loc_angle(double a12, double a23, double a13, int sigma) {
  require_side(a12, "a12");
  require_side(a23, "a23");
  require_side(a13, "a13");
  const double u = loc_u(a12, a23, a13, sigma);
  if (u < -kSlack) {
    throw Error(ErrorCode::infeasible, kModule, "reverse triangle inequality violated");
  }
  return acosh1p(std::max(u, 0.0));
}

SignedAngle comparison_angle(double tau12, double tau21, double tau23, double tau32, double tau13,
                             double tau31) {
  const double t[3][3] = {{0.0, tau12, tau13}, {tau21, 0.0, tau23}, {tau31, tau32, 0.0}};
  int precedes[3] = {0, 0, 0};
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const bool fwd = t[i][j] > 0.0;
      const bool bwd = t[j][i] > 0.0;
      if (fwd == bwd) throw Error(ErrorCode::undefined_angle, kModule, "vertex pair not timelike related");
      ++precedes[fwd ? i : j];
    }
  }
  if (precedes[0] == precedes[1] || precedes[1] == precedes[2] || precedes[0] == precedes[2]) {
    throw Error(ErrorCode::undefined_angle, kModule, "timelike relations form a cycle");
  }
  const double a12 = std::max(tau12, tau21);
  const double a23 = std::max(tau23, tau32);
  const double a13 = std::max(tau13, tau31);
  if (std::max({a12, a23, a13}) >= kPi) throw Error(ErrorCode::size_bound, kModule, "side >= pi");
  const int sigma = precedes[1] == 1 ? 1 : -1;
  return {loc_angle(a12, a23, a13, sigma), sigma};
}

OrderedRealization realize_ordered(double a_pm, double a_mf, double a_pf) {
  if (!(a_pm > 0.0 && a_mf > 0.0 && a_pf > 0.0)) {
    throw Error(ErrorCode::infeasible, kModule, "triangle with a zero side");
  }
  if (!(a_pf < kPi)) throw Error(ErrorCode::size_bound, kModule, "longest side >= pi");
  if (a_pf < a_pm + a_mf - kSlack) {
    throw Error(ErrorCode::infeasible, kModule, "reverse triangle inequality violated");
  }
  const double h = 0.5 * a_pf;
  OrderedRealization r;
  r.past = {-std::sin(h), std::cos(h), 0.0};
  r.future = {std::sin(h), std::cos(h), 0.0};
  // Angle at the past vertex, then shoot along the unit-speed geodesic.
  const double omega = loc_angle(a_pm, a_pf, a_mf, -1);
  const AmbientPoint up{std::cos(h), std::sin(h), 0.0};
  const AmbientPoint dir = std::cosh(omega) * up + AmbientPoint{0.0, 0.0, std::sinh(omega)};
  r.middle = std::cos(a_pm) * r.past + std::sin(a_pm) * dir;
  return r;
}

TriangleRealization realize_triangle(const TriangleSides& s) {
  if (s.sigma != 1 && s.sigma != -1) throw Error(ErrorCode::parameter, kModule, "sigma must be +1 or -1");
  for (double a : {s.a12, s.a23, s.a13}) {
    if (!(a < kPi)) throw Error(ErrorCode::size_bound, kModule, "side >= pi");
  }
  // Vertex labels 0,1,2 stand for x1,x2,x3.
  int past = 0, mid = 1, fut = 2;
  double a_pm = s.a12, a_mf = s.a23, a_pf = s.a13;
  if (s.sigma < 0) {
    past = 1;
    if (s.a23 >= s.a12) {
      mid = 0, fut = 2, a_pm = s.a12, a_mf = s.a13, a_pf = s.a23;
    } else {
      mid = 2, fut = 0, a_pm = s.a23, a_mf = s.a13, a_pf = s.a12;
    }
  }
  const OrderedRealization o = realize_ordered(a_pm, a_mf, a_pf);

  TriangleRealization tri;
  tri.ambient[past] = o.past;
  tri.ambient[mid] = o.middle;
  tri.ambient[fut] = o.future;
  tri.x1 = chart_point(tri.ambient[0]);
  tri.x2 = chart_point(tri.ambient[1]);
  tri.x3 = chart_point(tri.ambient[2]);

  auto rank = [&](int v) { return v == past ? 0 : (v == mid ? 1 : 2); };
  const int ends[3][2] = {{0, 1}, {1, 2}, {0, 2}};
  const double lengths[3] = {s.a12, s.a23, s.a13};
  for (int k = 0; k < 3; ++k) {
    int a = ends[k][0], b = ends[k][1];
    if (rank(a) > rank(b)) std::swap(a, b);
    SideGeodesic& g = tri.sides[k];
    g.past = a;
    g.future = b;
    g.length = lengths[k];
    g.start = tri.ambient[a];
    g.tangent = unit_direction(tri.ambient[a], tri.ambient[b]);
  }
  return tri;
}

AmbientPoint comparison_point_ambient(const TriangleRealization& tri, SideId side, double s) {
  const SideGeodesic& g = tri.sides[static_cast<int>(side)];
  if (!(s >= -kSlack && s <= g.length + kSlack)) {
    throw Error(ErrorCode::parameter, kModule, "arclength outside the side");
  }
  if (s <= 0.0) return tri.ambient[g.past];
  if (s >= g.length) return tri.ambient[g.future];
  return std::cos(s) * g.start + std::sin(s) * g.tangent;
}

AdsPoint comparison_point(const TriangleRealization& tri, SideId side, double s) {
  const SideGeodesic& g = tri.sides[static_cast<int>(side)];
  const AdsPoint* v[3] = {&tri.x1, &tri.x2, &tri.x3};
  if (s == 0.0) return *v[g.past];
  if (s == g.length) return *v[g.future];
  return chart_point(comparison_point_ambient(tri, side, s));
}

AmbientPoint segment_point(AmbientPoint P, AmbientPoint Q, double length, double s) {
  if (s <= 0.0) return P;
  if (s >= length) return Q;
  return std::cos(s) * P + std::sin(s) * unit_direction(P, Q);
}

AmbientPoint unit_direction(AmbientPoint P, AmbientPoint Q) {
  const IntervalResult r = ambient_tau(P, Q);
  if (!(r.tau > 0.0)) throw Error(ErrorCode::degenerate, kModule, "direction needs a timelike pair");
  return (1.0 / std::sin(r.tau)) * (Q - std::cos(r.tau) * P);
}

double hyperbolic_angle(AmbientPoint u, AmbientPoint v) {
  return acosh1p(std::max(std::abs(bilinear(u, v)) - 1.0, 0.0));
}

AmbientPoint realize_from_anchors(AmbientPoint A, AmbientPoint B, double tau_a, double tau_b, int side) {
  const double cl = -bilinear(A, B);
  const double det = 1.0 - cl * cl;
  if (!(det > 1e-14)) throw Error(ErrorCode::degenerate, kModule, "anchors too close or antipodal");
  const double ca = std::cos(tau_a), cb = std::cos(tau_b);
  const double alpha = (ca - cl * cb) / det;
  const double beta = (cb - cl * ca) / det;
  // Unit spacelike normal to span{A, B}; positive side is +x when A is below B
  // on the central line.
  AmbientPoint n{-(B.s2 * A.z - B.z * A.s2), -(B.z * A.s1 - B.s1 * A.z), B.s1 * A.s2 - B.s2 * A.s1};
  const double nn = bilinear(n, n);
  if (!(nn > 0.0)) throw Error(ErrorCode::degenerate, kModule, "anchors do not span a timelike plane");
  n = (1.0 / std::sqrt(nn)) * n;
  const double z2 = alpha * alpha + beta * beta + 2.0 * alpha * beta * cl - 1.0;
  if (z2 < -kSlack) throw Error(ErrorCode::infeasible, kModule, "no point with these separations");
  const double zeta = std::sqrt(std::max(z2, 0.0));
  return alpha * A + beta * B + (side >= 0 ? zeta : -zeta) * n;
}

std::pair<double, double> GeodesicParams::domain() const {
  const double lp = std::asin(1.0 / std::cosh(omega));
  return {-lp, lp};
}

AdsPoint geodesic_point(const GeodesicParams& g, double lambda) {
  const auto [lo, hi] = g.domain();
  if (!(lambda > lo && lambda < hi)) throw Error(ErrorCode::domain, kModule, "lambda outside geodesic domain");
  const double sl = std::sin(lambda);
  const double s = sl * std::cosh(g.omega);
  const double t = std::asin(s);
  const double x = std::asinh(sl * std::sinh(g.omega) / std::sqrt((1.0 - s) * (1.0 + s))) + g.c;
  return {t, x};
}

// log(tan(t/2 + pi/4)) is the inverse Gudermannian, asinh(tan t).
double conformal_time(double t) { return std::asinh(std::tan(t)); }

double conformal_time_inv(double s) { return std::atan(std::sinh(s)); }

double causal_boundary_tau(double t0, double t1) {
  // (1 - sin t1) / cos t1 rewritten as cos t1 / (1 + sin t1).
  const double arg = std::cos(t0) * std::cos(t1) / (1.0 + std::sin(t1)) + std::sin(t0);
  if (arg > 1.0 + kSlack) return 0.0;
  return std::acos(std::clamp(arg, -1.0, 1.0));
}

}  // namespace llk
