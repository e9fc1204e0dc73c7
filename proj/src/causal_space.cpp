#include "llk/causal_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>

#include "llk/errors.hpp"
#include "llk/parallel.hpp"

namespace llk {

namespace {

const char* const kModule = "causal_space";
constexpr double kTieTol = 1e-12;

double forward_tau(const IntervalResult& r) { return r.relation == Relation::timelike ? r.tau : 0.0; }

// Positive one of the two directed separations, or 0.
double pair_tau(const FiniteCausalSpace& X, std::size_t a, std::size_t b) {
  return std::max(X.t(a, b), X.t(b, a));
}

void require_index(const FiniteCausalSpace& X, std::size_t i) {
  if (i >= X.size()) throw Error(ErrorCode::parameter, kModule, "point index out of range");
}

std::optional<SignedAngle> try_angle(const FiniteCausalSpace& X, std::size_t a, std::size_t v, std::size_t c) {
  try {
    return comparison_angle(X.t(a, v), X.t(v, a), X.t(v, c), X.t(c, v), X.t(a, c), X.t(c, a));
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::undefined_angle:
      case ErrorCode::size_bound:
      case ErrorCode::infeasible:
        return std::nullopt;
      default:
        throw;
    }
  }
}

std::size_t null_steps(const FiniteCausalSpace& X, const Chain& c) {
  std::size_t n = 0;
  for (std::size_t k = 1; k < c.size(); ++k) {
    if (!(pair_tau(X, c.points[k - 1], c.points[k]) > 0.0)) ++n;
  }
  return n;
}

// Params are consistent with tau and the chain does not beat its endpoints.
void check_chain(const FiniteCausalSpace& X, const Chain& c, std::size_t from, std::size_t to, const char* name) {
  if (c.size() < 2 || c.front() != from || c.back() != to || c.params.size() != c.size()) {
    throw Error(ErrorCode::configuration, kModule, std::string("side chain ") + name + " does not join its vertices");
  }
  for (std::size_t k = 1; k < c.size(); ++k) {
    const std::size_t a = c.points[k - 1], b = c.points[k];
    require_index(X, b);
    const double step = c.params[k] - c.params[k - 1];
    if (!X.le(a, b) || std::abs(step - X.t(a, b)) > 1e-12 * std::max(1.0, c.params[k])) {
      throw Error(ErrorCode::stale_chain, kModule, std::string("side chain ") + name + " disagrees with tau");
    }
  }
  if (c.value() > X.t(from, to) + 1e-9) {
    throw Error(ErrorCode::stale_chain, kModule, std::string("side chain ") + name + " exceeds tau");
  }
}

// sign(theta) * (cosh(theta) - 1), strictly increasing in theta.
double signed_cosh_m1(double theta) {
  const double h = std::sinh(0.5 * theta);
  return std::copysign(2.0 * h * h, theta);
}

}  // namespace

FiniteCausalSpace FiniteCausalSpace::sized(std::size_t n) {
  FiniteCausalSpace X;
  X.labels.resize(n);
  X.tau.assign(n * n, 0.0);
  X.leq.assign(n * n, 0);
  return X;
}

void check_shape(const FiniteCausalSpace& X) {
  const std::size_t n = X.size();
  if (X.tau.size() != n * n) throw Error(ErrorCode::structural, kModule, "tau is not n x n");
  if (X.leq.size() != n * n) throw Error(ErrorCode::structural, kModule, "leq is not n x n");
  if (!X.coords.empty()) {
    if (X.coords.size() != n) throw Error(ErrorCode::structural, kModule, "coords length differs from labels");
    for (const auto& c : X.coords) {
      if (c.empty()) throw Error(ErrorCode::structural, kModule, "empty coordinate row");
    }
  }
}

Chain make_chain(const FiniteCausalSpace& X, std::vector<std::size_t> points) {
  if (points.empty()) throw Error(ErrorCode::parameter, kModule, "empty chain");
  Chain c;
  c.params.reserve(points.size());
  c.params.push_back(0.0);
  require_index(X, points[0]);
  for (std::size_t k = 1; k < points.size(); ++k) {
    require_index(X, points[k]);
    if (!X.le(points[k - 1], points[k])) {
      throw Error(ErrorCode::configuration, kModule, "consecutive chain points are not causally related");
    }
    c.params.push_back(c.params.back() + X.t(points[k - 1], points[k]));
  }
  c.points = std::move(points);
  return c;
}

Chain reversed(const FiniteCausalSpace& X, const Chain& c) {
  (void)X;
  Chain r;
  const double total = c.value();
  for (std::size_t k = c.size(); k-- > 0;) {
    r.points.push_back(c.points[k]);
    r.params.push_back(total - c.params[k]);
  }
  if (!r.params.empty()) r.params.front() = 0.0;
  return r;
}

void ComparisonReport::record(const Violation& v) {
  ++violation_count;
  if (violations.size() < max_listed) violations.push_back(v);
  max_deficit = std::max(max_deficit, v.deficit);
}

double ComparisonReport::note_value(const std::string& key, double fallback) const {
  for (const auto& [k, v] : notes) {
    if (k == key) return v;
  }
  return fallback;
}

void ComparisonReport::absorb(const ComparisonReport& other) {
  checked += other.checked;
  violation_count += other.violation_count;
  for (const auto& v : other.violations) {
    if (violations.size() >= max_listed) break;
    violations.push_back(v);
  }
  max_deficit = std::max(max_deficit, other.max_deficit);
  max_excess = std::max(max_excess, other.max_excess);
  excess_count += other.excess_count;
}

ComparisonReport validate_space(const FiniteCausalSpace& X, double tol, int jobs) {
  check_shape(X);
  const std::size_t n = X.size();
  std::vector<ComparisonReport> rows(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    ComparisonReport& r = rows[i];
    if (X.t(i, i) != 0.0) r.record({i, i, X.t(i, i), 0.0, std::abs(X.t(i, i)), "diagonal"});
    if (!X.le(i, i)) r.record({i, i, 0.0, 0.0, 0.0, "reflexivity"});
    for (std::size_t j = 0; j < n; ++j) {
      const double tij = X.t(i, j);
      ++r.checked;
      if (std::isnan(tij) || tij < 0.0) {
        r.record({i, j, tij, 0.0, std::isnan(tij) ? kInf : -tij, "range"});
        continue;
      }
      if (tij > 0.0 && !X.le(i, j)) r.record({i, j, tij, 0.0, tij, "timelikeness"});
      if (i < j && X.le(i, j) && X.le(j, i)) r.record({i, j, tij, X.t(j, i), 0.0, "antisymmetry"});
      if (i == j || !X.le(i, j)) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j || !X.le(j, k)) continue;
        ++r.checked;
        if (!X.le(i, k)) {
          r.record({i, k, 0.0, 0.0, 0.0, "transitivity"});
          continue;
        }
        const double sum = tij + X.t(j, k);
        const double tik = X.t(i, k);
        if (tik < sum - tol) r.record({i, k, tik, sum, sum - tik, "reverse_triangle"});
        if (tij > 0.0 && X.t(j, k) > 0.0 && !(tik > 0.0)) r.record({i, k, tik, 0.0, 0.0, "timelike_transitivity"});
      }
    }
  });
  ComparisonReport out;
  out.check = "validate_space";
  out.tolerance = tol;
  for (const auto& r : rows) out.absorb(r);
  out.finish();
  return out;
}

Chain longest_chain(const FiniteCausalSpace& X, std::size_t i, std::size_t j) {
  check_shape(X);
  require_index(X, i);
  require_index(X, j);
  if (!X.le(i, j)) throw Error(ErrorCode::no_chain, kModule, "endpoints are not causally related");
  if (i == j) return make_chain(X, {i});

  std::vector<std::size_t> S;
  for (std::size_t k = 0; k < X.size(); ++k) {
    if (X.le(i, k) && X.le(k, j)) S.push_back(k);
  }
  for (std::size_t a = 0; a < S.size(); ++a) {
    for (std::size_t b = a + 1; b < S.size(); ++b) {
      if (X.le(S[a], S[b]) && X.le(S[b], S[a])) {
        throw Error(ErrorCode::causality, kModule,
                    "causal cycle between " + X.labels[S[a]] + " and " + X.labels[S[b]]);
      }
    }
  }

  // Topological order: sample time when it is strictly isotone, else Kahn.
  std::vector<std::size_t> order = S;
  bool isotone = !X.coords.empty();
  if (isotone) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return X.coords[a][0] < X.coords[b][0]; });
    for (std::size_t a = 0; a < S.size() && isotone; ++a) {
      for (std::size_t b = 0; b < S.size(); ++b) {
        if (a != b && X.le(S[a], S[b]) && !(X.coords[S[a]][0] < X.coords[S[b]][0])) {
          isotone = false;
          break;
        }
      }
    }
  }
  if (!isotone) {
    std::vector<std::size_t> indeg(S.size(), 0);
    for (std::size_t a = 0; a < S.size(); ++a) {
      for (std::size_t b = 0; b < S.size(); ++b) {
        if (a != b && X.le(S[a], S[b])) ++indeg[b];
      }
    }
    order.clear();
    std::set<std::size_t> ready;
    for (std::size_t a = 0; a < S.size(); ++a) {
      if (indeg[a] == 0) ready.insert(a);
    }
    while (!ready.empty()) {
      const std::size_t a = *ready.begin();
      ready.erase(ready.begin());
      order.push_back(S[a]);
      for (std::size_t b = 0; b < S.size(); ++b) {
        if (b != a && X.le(S[a], S[b]) && --indeg[b] == 0) ready.insert(b);
      }
    }
  }

  const std::size_t n = X.size();
  std::vector<double> g(n, -1.0);
  std::vector<std::size_t> next(n, n);
  std::vector<std::uint8_t> done(n, 0);
  g[j] = 0.0;
  done[j] = 1;
  for (std::size_t idx = order.size(); idx-- > 0;) {
    const std::size_t k = order[idx];
    if (k == j) continue;
    double best = -1.0;
    for (std::size_t m : S) {
      if (m != k && done[m] && X.le(k, m)) best = std::max(best, X.t(k, m) + g[m]);
    }
    // S is sorted by index, so the first near-best successor is the smallest.
    const double slack = kTieTol * std::max(1.0, std::isinf(best) ? 1.0 : best);
    for (std::size_t m : S) {
      if (m == k || !done[m] || !X.le(k, m)) continue;
      const double v = X.t(k, m) + g[m];
      if (v >= best - slack) {
        next[k] = m;
        g[k] = v;
        break;
      }
    }
    done[k] = 1;
  }
  std::vector<std::size_t> pts{i};
  while (pts.back() != j) pts.push_back(next[pts.back()]);
  return make_chain(X, std::move(pts));
}

double Triangle::loss(const FiniteCausalSpace& X) const {
  const double a = X.t(past, middle) - pm.value();
  const double b = X.t(middle, future) - mf.value();
  const double c = X.t(past, future) - pf.value();
  return std::max({0.0, a, b, c});
}

Triangle make_triangle(const FiniteCausalSpace& X, std::size_t a, std::size_t b, std::size_t c) {
  require_index(X, a);
  require_index(X, b);
  require_index(X, c);
  std::size_t v[3] = {a, b, c};
  int precedes[3] = {0, 0, 0};
  for (int p = 0; p < 3; ++p) {
    for (int q = p + 1; q < 3; ++q) {
      const bool fwd = X.ll(v[p], v[q]), bwd = X.ll(v[q], v[p]);
      if (fwd == bwd) throw Error(ErrorCode::configuration, kModule, "triangle vertices not pairwise timelike related");
      ++precedes[fwd ? p : q];
    }
  }
  Triangle tri;
  for (int p = 0; p < 3; ++p) {
    if (precedes[p] == 2) tri.past = v[p];
    if (precedes[p] == 1) tri.middle = v[p];
    if (precedes[p] == 0) tri.future = v[p];
  }
  if (!(precedes[0] + precedes[1] + precedes[2] == 3) || tri.past == tri.middle || tri.middle == tri.future) {
    throw Error(ErrorCode::configuration, kModule, "triangle vertices are not totally ordered");
  }
  if (!(X.t(tri.past, tri.future) < kSizeBound)) {
    throw Error(ErrorCode::size_bound, kModule, "longest side breaches the size bound");
  }
  tri.pm = longest_chain(X, tri.past, tri.middle);
  tri.mf = longest_chain(X, tri.middle, tri.future);
  tri.pf = longest_chain(X, tri.past, tri.future);
  return tri;
}

double chain_budget(const FiniteCausalSpace& X) {
  if (X.coords.empty()) return kInf;
  std::vector<double> ts;
  ts.reserve(X.size());
  for (const auto& c : X.coords) ts.push_back(c[0]);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  double step = 0.0;
  for (std::size_t k = 1; k < ts.size(); ++k) step = std::max(step, ts[k] - ts[k - 1]);
  return ts.size() < 2 ? kInf : 2.0 * step;
}

ComparisonReport check_triangle_comparison(const FiniteCausalSpace& X, const Triangle& tri, double tol,
                                           double epsilon) {
  check_shape(X);
  check_chain(X, tri.pm, tri.past, tri.middle, "pm");
  check_chain(X, tri.mf, tri.middle, tri.future, "mf");
  check_chain(X, tri.pf, tri.past, tri.future, "pf");
  const double a_pm = X.t(tri.past, tri.middle);
  const double a_mf = X.t(tri.middle, tri.future);
  const double a_pf = X.t(tri.past, tri.future);
  if (!(a_pf < kSizeBound)) throw Error(ErrorCode::size_bound, kModule, "longest side breaches the size bound");
  const double loss = tri.loss(X);
  if (loss > epsilon) throw Error(ErrorCode::stale_chain, kModule, "side chain loses more than the budget");

  const OrderedRealization R = realize_ordered(a_pm, a_mf, a_pf);
  struct Mapped {
    std::size_t index;
    AmbientPoint at;
  };
  std::vector<Mapped> pts;
  std::vector<std::uint8_t> seen(X.size(), 0);
  auto add_side = [&](const Chain& c, AmbientPoint A, AmbientPoint B, double length) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      const std::size_t idx = c.points[k];
      if (seen[idx]) continue;
      seen[idx] = 1;
      AmbientPoint at = k == 0 ? A : k + 1 == c.size() ? B : segment_point(A, B, length, c.params[k]);
      pts.push_back({idx, at});
    }
  };
  add_side(tri.pm, R.past, R.middle, a_pm);
  add_side(tri.mf, R.middle, R.future, a_mf);
  add_side(tri.pf, R.past, R.future, a_pf);

  ComparisonReport rep;
  rep.check = "triangle_comparison";
  const double tol_eff = tol + loss;
  rep.tolerance = tol_eff;
  std::size_t nulls = null_steps(X, tri.pm) + null_steps(X, tri.mf) + null_steps(X, tri.pf);
  for (const auto& u : pts) {
    for (const auto& w : pts) {
      if (u.index == w.index) continue;
      const double t = X.t(u.index, w.index);
      const double tb = forward_tau(ambient_tau(u.at, w.at));
      ++rep.checked;
      const double deficit = t - tb;
      rep.max_deficit = std::max(rep.max_deficit, deficit);
      rep.max_excess = std::max(rep.max_excess, -deficit);
      if (deficit > tol_eff) rep.record({u.index, w.index, t, tb, deficit, "lower_bound"});
      if (-deficit > tol_eff) ++rep.excess_count;
    }
  }
  rep.note("chain_loss", loss);
  rep.note("side_points", static_cast<double>(pts.size()));
  rep.note("null_steps", static_cast<double>(nulls));
  rep.finish();
  return rep;
}

ComparisonReport check_monotonicity(const FiniteCausalSpace& X, std::size_t vertex, const Chain& alpha,
                                    const Chain& beta, double tol) {
  check_shape(X);
  if (alpha.size() == 0 || beta.size() == 0 || alpha.front() != vertex || beta.front() != vertex) {
    throw Error(ErrorCode::configuration, kModule, "chains must start at the vertex");
  }
  if (!(alpha.value() < kSizeBound) || !(beta.value() < kSizeBound)) {
    throw Error(ErrorCode::size_bound, kModule, "chain length breaches the size bound");
  }
  const std::size_t ns = alpha.size(), nt = beta.size();
  std::vector<std::optional<double>> theta(ns * nt);
  std::size_t defined = 0;
  double lo = kInf, hi = -kInf;
  for (std::size_t s = 1; s < ns; ++s) {
    for (std::size_t t = 1; t < nt; ++t) {
      const std::size_t a = alpha.points[s], c = beta.points[t];
      if (a == c || a == vertex || c == vertex) continue;
      if (auto ang = try_angle(X, a, vertex, c)) {
        theta[s * nt + t] = ang->value();
        ++defined;
        lo = std::min(lo, ang->value());
        hi = std::max(hi, ang->value());
      }
    }
  }
  if (defined == 0) throw Error(ErrorCode::empty_domain, kModule, "no grid pair with a defined angle");

  ComparisonReport rep;
  rep.check = "monotonicity";
  rep.tolerance = tol;
  double variation = 0.0;
  auto step = [&](std::size_t s0, std::size_t t0, std::size_t s1, std::size_t t1) {
    const double before = *theta[s0 * nt + t0], after = *theta[s1 * nt + t1];
    ++rep.checked;
    variation += std::abs(after - before);
    const double drop = before - after;
    // Near a degenerate triangle the angle carries sqrt-sized round-off from
    // the sides; the signed cosh-1 it comes from does not.
    const double lift = signed_cosh_m1(before) - signed_cosh_m1(after);
    if (drop > tol && lift > tol) rep.record({alpha.points[s1], beta.points[t1], after, before, drop, "decrease"});
    else rep.max_deficit = std::max(rep.max_deficit, drop);
  };
  for (std::size_t t = 1; t < nt; ++t) {
    std::optional<std::size_t> prev;
    for (std::size_t s = 1; s < ns; ++s) {
      if (!theta[s * nt + t]) continue;
      if (prev) step(*prev, t, s, t);
      prev = s;
    }
  }
  for (std::size_t s = 1; s < ns; ++s) {
    std::optional<std::size_t> prev;
    for (std::size_t t = 1; t < nt; ++t) {
      if (!theta[s * nt + t]) continue;
      if (prev) step(s, *prev, s, t);
      prev = t;
    }
  }
  rep.note("defined", static_cast<double>(defined));
  rep.note("spread", hi - lo);
  rep.note("total_variation", variation);
  rep.note("null_steps", static_cast<double>(null_steps(X, alpha) + null_steps(X, beta)));
  rep.finish();
  return rep;
}

AngleEstimate upper_angle_estimate(const FiniteCausalSpace& X, std::size_t vertex, const Chain& alpha,
                                   const Chain& beta) {
  check_shape(X);
  if (alpha.size() < 3 || beta.size() < 3 || alpha.front() != vertex || beta.front() != vertex) {
    throw Error(ErrorCode::configuration, kModule, "angle estimate needs chains of 3+ points from the vertex");
  }
  struct Entry {
    double key;
    std::size_t s, t;
    double omega;
  };
  std::vector<Entry> entries;
  for (std::size_t s = 1; s < alpha.size(); ++s) {
    for (std::size_t t = 1; t < beta.size(); ++t) {
      const std::size_t a = alpha.points[s], c = beta.points[t];
      if (a == c) continue;
      if (auto ang = try_angle(X, a, vertex, c)) entries.push_back({alpha.params[s] + beta.params[t], s, t, ang->omega});
    }
  }
  if (entries.empty()) throw Error(ErrorCode::undefined_angle, kModule, "no grid pair with a defined angle");
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.key != y.key) return x.key < y.key;
    if (x.s != y.s) return x.s < y.s;
    return x.t < y.t;
  });
  AngleEstimate est{entries[0].omega, 0.0, entries[0].s, entries[0].t};
  double lo = entries[0].omega, hi = lo;
  for (std::size_t k = 1; k < std::min<std::size_t>(4, entries.size()); ++k) {
    lo = std::min(lo, entries[k].omega);
    hi = std::max(hi, entries[k].omega);
  }
  est.spread = hi - lo;
  return est;
}

ComparisonReport check_subdivision(const FiniteCausalSpace& X, const Triangle& tri, std::size_t p,
                                   SubdivisionKind which, double tol) {
  check_shape(X);
  require_index(X, p);
  const Chain* side = nullptr;
  std::size_t opposite = 0;
  double s_p = 0.0;
  struct Cand {
    const Chain* c;
    std::size_t o;
  };
  const Cand cands[3] = {{&tri.pf, tri.middle}, {&tri.pm, tri.future}, {&tri.mf, tri.past}};
  // Chains may share points; search the sides this version can use first.
  const bool across = which == SubdivisionKind::across;
  const Cand order[3] = {across ? cands[0] : cands[1], across ? cands[1] : cands[2], across ? cands[2] : cands[0]};
  for (const auto& cand : order) {
    const Chain& c = *cand.c;
    for (std::size_t k = 1; k + 1 < c.size(); ++k) {
      if (c.points[k] == p) {
        side = &c;
        opposite = cand.o;
        s_p = c.params[k];
        break;
      }
    }
    if (side) break;
  }
  if (!side) throw Error(ErrorCode::configuration, kModule, "point is not interior to a side chain");
  const bool on_long = side == &tri.pf;
  if ((which == SubdivisionKind::across) != on_long) {
    throw Error(ErrorCode::configuration, kModule,
                which == SubdivisionKind::across ? "across version needs a point on the long side"
                                                 : "future version needs a point on a short side");
  }
  const double t_po = pair_tau(X, p, opposite);
  if (!(t_po > 0.0)) throw Error(ErrorCode::configuration, kModule, "point not timelike related to the opposite vertex");

  const std::size_t A = side->front(), B = side->back();
  const double a_pm = X.t(tri.past, tri.middle), a_mf = X.t(tri.middle, tri.future), a_pf = X.t(tri.past, tri.future);
  const OrderedRealization R = realize_ordered(a_pm, a_mf, a_pf);
  auto whole = [&](std::size_t v) { return v == tri.past ? R.past : v == tri.middle ? R.middle : R.future; };
  const AmbientPoint At = whole(A), Bt = whole(B), Ot = whole(opposite);
  const AmbientPoint pt = segment_point(At, Bt, X.t(A, B), s_p);
  const double t_bar = forward_tau(ambient_tau(pt, Ot)) + forward_tau(ambient_tau(Ot, pt));

  // Glue the two sub-comparison triangles along p-O, with A and B on opposite sides.
  const double h = 0.5 * t_po;
  const bool p_first = X.ll(p, opposite);
  const AmbientPoint lower{-std::sin(h), std::cos(h), 0.0}, upper{std::sin(h), std::cos(h), 0.0};
  const AmbientPoint pb = p_first ? lower : upper, Ob = p_first ? upper : lower;
  const AmbientPoint Ab = realize_from_anchors(pb, Ob, pair_tau(X, A, p), pair_tau(X, A, opposite), 1);
  const AmbientPoint Bb = realize_from_anchors(pb, Ob, pair_tau(X, p, B), pair_tau(X, B, opposite), -1);

  ComparisonReport rep;
  rep.check = which == SubdivisionKind::across ? "subdivision_across" : "subdivision_future";
  rep.tolerance = tol;
  const bool convex = t_po <= t_bar + tol;
  const bool concave = t_po >= t_bar - tol;
  rep.note("tau", t_po);
  rep.note("comparison_tau", t_bar);
  rep.note("convex", convex ? 1.0 : 0.0);
  rep.note("concave", concave ? 1.0 : 0.0);

  std::size_t undefined = 0;
  auto angle = [&](AmbientPoint v, AmbientPoint a, AmbientPoint b) -> std::optional<double> {
    try {
      return hyperbolic_angle(unit_direction(v, a), unit_direction(v, b));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::degenerate) throw;
      ++undefined;
      return std::nullopt;
    }
  };
  // sign +1: bar >= tilde expected, -1: bar <= tilde.
  auto compare = [&](std::optional<double> bar, std::optional<double> tilde, int sign, std::size_t i, std::size_t j,
                     const char* kind) {
    if (!bar || !tilde) return;
    ++rep.checked;
    const double deficit = sign > 0 ? *tilde - *bar : *bar - *tilde;
    const double lift = sign > 0 ? signed_cosh_m1(*tilde) - signed_cosh_m1(*bar)
                                 : signed_cosh_m1(*bar) - signed_cosh_m1(*tilde);
    if (deficit > tol && lift > tol) rep.record({i, j, *bar, *tilde, deficit, kind});
    else rep.max_deficit = std::max(rep.max_deficit, deficit);
  };
  // Sub-triangle 1 holds A, sub-triangle 2 holds B. In the future version A
  // is the side endpoint away from the middle vertex.
  const bool future = which == SubdivisionKind::future;
  const bool a_is_middle = future && A == tri.middle;
  const AmbientPoint X1b = a_is_middle ? Bb : Ab, X1t = a_is_middle ? Bt : At;
  const AmbientPoint X2b = a_is_middle ? Ab : Bb, X2t = a_is_middle ? At : Bt;
  const std::size_t x1 = a_is_middle ? B : A, x2 = a_is_middle ? A : B;
  auto branch = [&](int sign1, int sign2) {
    compare(angle(X1b, pb, Ob), angle(X1t, pt, Ot), sign1, x1, p, "sub1_angle_end");
    compare(angle(pb, X1b, Ob), angle(pt, X1t, Ot), sign1, x1, p, "sub1_angle_p");
    compare(angle(Ob, X1b, pb), angle(Ot, X1t, pt), sign1, x1, opposite, "sub1_angle_opposite");
    compare(angle(X2b, pb, Ob), angle(X2t, pt, Ot), sign2, x2, p, "sub2_angle_end");
    compare(angle(pb, X2b, Ob), angle(pt, X2t, Ot), sign2, x2, p, "sub2_angle_p");
    compare(angle(Ob, X2b, pb), angle(Ot, X2t, pt), sign2, x2, opposite, "sub2_angle_opposite");
  };
  if (convex) branch(1, future ? -1 : 1);
  if (concave) branch(-1, future ? 1 : -1);
  // Unconditional bound on the angle at the opposite vertex.
  compare(angle(Ob, Ab, Bb), angle(Ot, At, Bt), future ? -1 : 1, A, B, "opposite_angle");
  rep.note("undefined_angles", static_cast<double>(undefined));
  rep.finish();
  return rep;
}

ComparisonReport myers_check(const FiniteCausalSpace& X, double tol) {
  check_shape(X);
  ComparisonReport rep;
  rep.check = "myers";
  rep.tolerance = tol;
  const std::size_t n = X.size();
  double max_tau = 0.0;
  std::size_t infinite = 0, near = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double t = X.t(i, j);
      if (std::isinf(t)) {
        ++infinite;
        continue;
      }
      ++rep.checked;
      max_tau = std::max(max_tau, t);
      if (t > kPi + tol) {
        rep.record({i, j, t, kPi, t - kPi, "diameter"});
      } else if (t > kPi - tol) {
        ++near;
        if (rep.violations.size() < rep.max_listed) rep.violations.push_back({i, j, t, kPi, t - kPi, "near_diameter"});
      }
    }
  }
  rep.note("max_tau", max_tau);
  rep.note("near_count", static_cast<double>(near));
  rep.note("infinite_count", static_cast<double>(infinite));
  rep.finish();
  return rep;
}

TriangleSample sample_triangle(const FiniteCausalSpace& X, std::uint64_t seed, std::uint64_t item, int attempts) {
  const std::size_t n = X.size();
  TriangleSample out;
  if (n < 3) return out;
  CounterRng rng(seed, item);
  for (int a = 0; a < attempts; ++a) {
    const std::size_t x = rng.below(n), z = rng.below(n);
    if (!X.ll(x, z) || !(X.t(x, z) < kSizeBound)) continue;
    const Chain c = longest_chain(X, x, z);
    if (c.size() < 3) continue;
    std::vector<std::uint8_t> on_chain(n, 0);
    for (std::size_t k : c.points) on_chain[k] = 1;
    std::vector<std::size_t> ys;
    for (std::size_t y = 0; y < n; ++y) {
      if (on_chain[y]) continue;
      const bool rx = X.ll(x, y) || X.ll(y, x);
      const bool rz = X.ll(y, z) || X.ll(z, y);
      if (!rx || !rz) continue;
      const std::size_t lo = X.ll(y, x) ? y : x;
      const std::size_t hi = X.ll(z, y) ? y : z;
      if (X.t(lo, hi) < kSizeBound) ys.push_back(y);
    }
    if (ys.empty()) continue;
    const std::size_t y = ys[rng.below(ys.size())];
    out.triangle = make_triangle(X, x, y, z);
    const Chain* sides[3] = {&out.triangle.pm, &out.triangle.mf, &out.triangle.pf};
    for (int s : {2, 0, 1}) {
      if (sides[s]->size() >= 3) {
        out.long_side = s;
        out.long_side_point = sides[s]->points[sides[s]->size() / 2];
        out.found = true;
        return out;
      }
    }
  }
  return out;
}

}  // namespace llk
