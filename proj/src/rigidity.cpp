#include "llk/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <Eigen/Dense>

#include "llk/errors.hpp"
#include "llk/parallel.hpp"

namespace llk {

namespace {

const char* const kModule = "rigidity";
// Entries this close to the ends of the interval are reported, not judged.
constexpr double kEdgeCos = 0.05;
// Warped-product relations within this base margin of the light cone are not
// counted as mismatches.
constexpr double kMismatchMargin = 1e-6;
double pair_tau(const FiniteCausalSpace& X, std::size_t a, std::size_t b) { return std::max(X.t(a, b), X.t(b, a)); }

double forward(const IntervalResult& r) { return r.relation == Relation::timelike ? r.tau : 0.0; }

bool forward_causal(const IntervalResult& r) { return r.relation == Relation::timelike || r.relation == Relation::null; }

double arcosh_clamped(double v) { return std::acosh(std::max(1.0, v)); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool on_line(const LineSample& g, std::size_t z) {
  return std::find(g.chain.points.begin(), g.chain.points.end(), z) != g.chain.points.end();
}

// Distance between two points through their separation profiles against the line.
double profile_distance(const FiniteCausalSpace& X, const LineSample& g, std::size_t z, std::size_t w) {
  double d = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double a = X.sep(z, g.point(k)), b = X.sep(w, g.point(k));
    if (std::isfinite(a) && std::isfinite(b)) d = std::max(d, std::abs(a - b));
  }
  return d;
}

double hausdorff(const FiniteCausalSpace& X, const LineSample& g, const std::vector<std::size_t>& A,
                 const std::vector<std::size_t>& B) {
  auto directed = [&](const std::vector<std::size_t>& P, const std::vector<std::size_t>& Q) {
    double worst = 0.0;
    for (std::size_t a : P) {
      double best = kInf;
      for (std::size_t b : Q) best = std::min(best, profile_distance(X, g, a, b));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(A, B), directed(B, A));
}

// Chain points up to where the chain joins the line; p itself always stays.
std::vector<std::size_t> truncate_at_line(const LineSample& g, const Chain& c, std::size_t p, bool future) {
  std::vector<std::size_t> pts = c.points;
  if (!future) std::reverse(pts.begin(), pts.end());
  while (pts.size() > 1 && on_line(g, pts.back())) pts.pop_back();
  if (pts.empty()) pts.push_back(p);
  return pts;
}

LineSample asymptote_from_table(const FiniteCausalSpace& X, const LineSample& gamma,
                                const std::vector<std::optional<BusemannValue>>& table, std::size_t p,
                                double tol_exact, double tol_disc, bool allow_unsettled) {
  if (p >= X.size()) throw Error(ErrorCode::parameter, kModule, "point index out of range");
  if (!table[p]) throw Error(ErrorCode::domain, kModule, "point " + X.labels[p] + " is outside I(gamma)");

  // Tail chains towards the line; their interior points seed the asymptote.
  std::vector<std::size_t> fut, past;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    if (X.ll(p, gamma.point(k))) fut.push_back(k);
    if (X.ll(gamma.point(k), p)) past.push_back(k);
  }
  std::vector<std::size_t> seeds;
  bool settled = true;
  // Walk the tail from the far end inwards and keep the first consecutive
  // pair of truncated chains that agree within tol_disc.
  auto tail = [&](const std::vector<std::size_t>& ks, bool future) {
    if (ks.empty()) return;
    auto chain_at = [&](std::size_t idx) {
      const std::size_t g = gamma.point(ks[idx]);
      const Chain c = future ? longest_chain(X, p, g) : longest_chain(X, g, p);
      return truncate_at_line(gamma, c, p, future);
    };
    if (ks.size() == 1) {
      for (std::size_t z : chain_at(0)) seeds.push_back(z);
      return;
    }
    const std::size_t n = ks.size();
    auto pos = [&](std::size_t step) { return future ? n - 1 - step : step; };
    std::vector<std::size_t> outer = chain_at(pos(0));
    double best = kInf;
    for (std::size_t step = 1; step < n; ++step) {
      std::vector<std::size_t> inner = chain_at(pos(step));
      const double h = hausdorff(X, gamma, inner, outer);
      best = std::min(best, h);
      if (h <= tol_disc) {
        for (std::size_t z : outer) seeds.push_back(z);
        return;
      }
      outer = std::move(inner);
    }
    if (allow_unsettled) {
      settled = false;
      return;
    }
    throw Error(ErrorCode::convergence, kModule,
                "maximizers from " + X.labels[p] + " do not settle (closest Hausdorff " + std::to_string(best) + ")");
  };
  tail(fut, true);
  tail(past, false);

  const BusemannValue& bp = *table[p];
  std::vector<std::size_t> cand{p};
  for (std::size_t z : seeds) {
    if (z != p && table[z]) cand.push_back(z);
  }
  for (std::size_t z = 0; z < X.size(); ++z) {
    if (z == p || !table[z] || !(X.le(p, z) || X.le(z, p))) continue;
    const double tol_id = std::max(tol_exact, 3.0 * std::max(bp.fit_rms, table[z]->fit_rms));
    if (std::abs(X.sep(p, z) - (table[z]->limit - bp.limit)) <= tol_id) cand.push_back(z);
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  std::stable_sort(cand.begin(), cand.end(),
                   [&](std::size_t a, std::size_t b) { return table[a]->limit < table[b]->limit; });

  // Keep a causal chain through p.
  const auto at = std::find(cand.begin(), cand.end(), p);
  std::vector<std::size_t> after{p}, before;
  for (auto it = at + 1; it != cand.end(); ++it) {
    if (X.le(after.back(), *it) && *it != after.back()) after.push_back(*it);
  }
  std::size_t last = p;
  for (auto it = at; it != cand.begin();) {
    --it;
    if (X.le(*it, last)) {
      before.push_back(*it);
      last = *it;
    }
  }
  std::vector<std::size_t> pts(before.rbegin(), before.rend());
  pts.insert(pts.end(), after.begin(), after.end());

  LineSample out;
  out.chain = make_chain(X, pts);
  out.margin = gamma.margin;
  out.settled = settled;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    out.param.push_back(table[pts[k]]->limit);
    if (k > 0) {
      const double dp = out.param[k] - out.param[k - 1];
      const double dt = out.chain.params[k] - out.chain.params[k - 1];
      out.epsilon = std::max(out.epsilon, std::abs(dp - dt));
    }
  }
  return out;
}

// Interior angle at the vertex opposite side z of a hyperbolic triangle.
double hyperbolic_vertex_angle(double x, double y, double z) {
  const double s = 0.5 * (x + y + z);
  // Slack at round-off level is a collinear triple; left alone it turns
  // into a sqrt(eps) angle.
  const double floor = 4.0 * std::numeric_limits<double>::epsilon() * s;
  auto slack = [&](double side) { return std::abs(s - side) <= floor ? 0.0 : s - side; };
  const double num = std::max(0.0, std::sinh(slack(x)) * std::sinh(slack(y)));
  const double den = std::max(0.0, std::sinh(s) * std::sinh(slack(z)));
  return 2.0 * std::atan2(std::sqrt(num), std::sqrt(den));
}

}  // namespace

double LineSample::step() const {
  double s = 0.0;
  for (std::size_t k = 1; k < param.size(); ++k) s = std::max(s, param[k] - param[k - 1]);
  return s;
}

LineSample line_from_chain(const FiniteCausalSpace& X, const Chain& c) {
  if (c.size() < 2) throw Error(ErrorCode::extraction, kModule, "a line needs at least two points");
  const double total = X.t(c.front(), c.back());
  if (!std::isfinite(total) || total > kPi) {
    throw Error(ErrorCode::extraction, kModule, "line longer than pi; no cos-suspension can carry it");
  }
  LineSample g;
  g.chain = c;
  g.margin = 0.5 * (kPi - total);
  g.epsilon = total - c.value();
  for (double s : c.params) g.param.push_back(-kPi / 2 + g.margin + s);
  return g;
}

LineSample find_line(const FiniteCausalSpace& X) {
  check_shape(X);
  const std::size_t n = X.size();
  double best = 0.0;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double t = X.t(i, j);
      if (std::isfinite(t) && t > best) {
        best = t;
        bi = i;
        bj = j;
      }
    }
  }
  if (!(best > 0.0)) throw Error(ErrorCode::extraction, kModule, "no timelike pair to carry a line");
  return line_from_chain(X, longest_chain(X, bi, bj));
}

double resolve_tol_disc(const LineSample& gamma, const RigidityOptions& opt) {
  return opt.tol_disc >= 0.0 ? opt.tol_disc : 2.0 * gamma.step();
}

BusemannValue busemann(const FiniteCausalSpace& X, const LineSample& gamma, std::size_t x, double tol) {
  if (x >= X.size()) throw Error(ErrorCode::parameter, kModule, "point index out of range");
  std::vector<double> ts, cs, fut, past;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    const std::size_t g = gamma.point(k);
    const double tk = gamma.param[k];
    double tau;
    if (X.ll(x, g)) {
      tau = X.t(x, g);
      if (std::isfinite(tau)) fut.push_back(tk - tau);
    } else if (X.ll(g, x)) {
      tau = X.t(g, x);
      if (std::isfinite(tau)) past.push_back(-tk - tau);
    } else {
      continue;
    }
    if (!std::isfinite(tau)) continue;
    ts.push_back(tk);
    cs.push_back(std::cos(tau));
  }
  if (ts.size() < 2) {
    throw Error(ErrorCode::domain, kModule, "point " + X.labels[x] + " is related to fewer than two line samples");
  }

  BusemannValue b;
  b.tail_used = fut.size() + past.size();
  // Future tail must not increase as t grows; past tail as t falls.
  for (std::size_t k = 1; k < fut.size(); ++k) b.monotone_gap = std::max(b.monotone_gap, fut[k] - fut[k - 1]);
  for (std::size_t k = 1; k < past.size(); ++k) b.monotone_gap = std::max(b.monotone_gap, past[k - 1] - past[k]);
  if (b.monotone_gap > tol) {
    throw Error(ErrorCode::data_quality, kModule,
                "Busemann tail of " + X.labels[x] + " is not monotone (gap " + std::to_string(b.monotone_gap) + ")");
  }
  if (!fut.empty()) b.plus = fut.back();
  if (!past.empty()) b.minus = past.front();
  b.certified = fut.size() >= 2 && past.size() >= 2;

  const auto m = static_cast<Eigen::Index>(ts.size());
  Eigen::MatrixX2d A(m, 2);
  Eigen::VectorXd y(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    A(k, 0) = std::sin(ts[static_cast<std::size_t>(k)]);
    A(k, 1) = std::cos(ts[static_cast<std::size_t>(k)]);
    y(k) = cs[static_cast<std::size_t>(k)];
  }
  const Eigen::Vector2d sol = A.colPivHouseholderQr().solve(y);
  b.limit = std::asin(std::clamp(sol(0), -1.0, 1.0));
  const double ct = std::cos(b.limit);
  b.offset = ct > 0.0 ? arcosh_clamped(sol(1) / ct) : 0.0;
  b.fit_rms = std::sqrt((A * sol - y).squaredNorm() / static_cast<double>(m));
  return b;
}

std::vector<std::optional<BusemannValue>> busemann_table(const FiniteCausalSpace& X, const LineSample& gamma,
                                                         double tol, int jobs) {
  std::vector<std::optional<BusemannValue>> out(X.size());
  parallel_for(X.size(), jobs, [&](std::size_t z) {
    try {
      out[z] = busemann(X, gamma, z, tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::domain) throw;
    }
  });
  return out;
}

LineSample construct_asymptote(const FiniteCausalSpace& X, const LineSample& gamma, std::size_t p,
                               const RigidityOptions& opt) {
  check_shape(X);
  const double tol_disc = resolve_tol_disc(gamma, opt);
  const auto table = busemann_table(X, gamma, tol_disc, opt.jobs);
  return asymptote_from_table(X, gamma, table, p, opt.tol_exact, tol_disc, opt.allow_unsettled);
}

ParallelReport c_functions(const FiniteCausalSpace& X, const LineSample& alpha, const LineSample& beta,
                           double tol) {
  ParallelReport r;
  r.tolerance = tol;
  auto edge = [](double s, double t) { return std::min(std::cos(s), std::cos(t)) < kEdgeCos; };
  auto formula = [](double cos_tau, double s, double t) {
    return arcosh_clamped((cos_tau - std::sin(s) * std::sin(t)) / (std::cos(s) * std::cos(t)));
  };
  for (std::size_t s = 0; s < alpha.size(); ++s) {
    for (std::size_t t = 0; t < beta.size(); ++t) {
      const std::size_t a = alpha.point(s), b = beta.point(t);
      const double ps = alpha.param[s], pt = beta.param[t];
      if (X.le(a, b) && std::isfinite(X.t(a, b))) r.c_ab.push_back({s, t, formula(std::cos(X.t(a, b)), ps, pt), edge(ps, pt)});
      if (X.le(b, a) && std::isfinite(X.t(b, a))) r.c_ba.push_back({s, t, formula(std::cos(X.t(b, a)), ps, pt), edge(ps, pt)});
    }
  }
  // Null functions: the first related sample bounds the infimum from above,
  // the sample before it from below (the formula bottoms out at t = s).
  auto nulls = [&](const LineSample& u, const LineSample& v, std::vector<NullEntry>& out) {
    for (std::size_t s = 0; s < u.size(); ++s) {
      const double ps = u.param[s];
      std::size_t first = v.size();
      for (std::size_t t = 0; t < v.size(); ++t) {
        if (X.le(u.point(s), v.point(t))) {
          first = t;
          break;
        }
      }
      if (first == v.size()) continue;
      NullEntry e;
      e.s_index = s;
      e.t_index = first;
      const double pt = v.param[first];
      e.hi = formula(1.0, ps, pt);
      e.excluded = edge(ps, pt);
      if (X.t(u.point(s), v.point(first)) == 0.0) {
        e.lo = e.hi;
      } else if (first == 0) {
        e.lo = 0.0;
      } else {
        const double prev = v.param[first - 1];
        e.lo = prev <= ps && ps <= pt ? 0.0 : std::min(formula(1.0, ps, prev), e.hi);
      }
      out.push_back(e);
    }
  };
  nulls(alpha, beta, r.null_a);
  nulls(beta, alpha, r.null_b);

  r.defined = r.c_ab.size() + r.c_ba.size() + r.null_a.size() + r.null_b.size();
  if (r.defined == 0) throw Error(ErrorCode::empty_domain, kModule, "lines have no causally related samples");

  std::vector<double> kept;
  for (const auto* tab : {&r.c_ab, &r.c_ba}) {
    for (const auto& e : *tab) {
      if (e.excluded) ++r.excluded;
      else kept.push_back(e.value);
    }
  }
  std::vector<double> mids;
  for (const auto* tab : {&r.null_a, &r.null_b}) {
    for (const auto& e : *tab) {
      if (e.excluded) ++r.excluded;
      else mids.push_back(0.5 * (e.lo + e.hi));
    }
  }
  if (kept.empty() && mids.empty()) {
    throw Error(ErrorCode::empty_domain, kModule, "every c entry sits at the edge of the interval");
  }
  r.constant = median(kept.empty() ? mids : kept);
  for (double v : kept) r.max_deviation = std::max(r.max_deviation, std::abs(v - r.constant));
  for (const auto* tab : {&r.null_a, &r.null_b}) {
    for (const auto& e : *tab) {
      if (e.excluded) continue;
      const double dev = r.constant < e.lo ? e.lo - r.constant : r.constant > e.hi ? r.constant - e.hi : 0.0;
      r.max_deviation = std::max(r.max_deviation, dev);
    }
  }
  r.pass = r.max_deviation <= tol;
  return r;
}

ParallelVerdict check_parallel(const FiniteCausalSpace& X, const LineSample& alpha, const LineSample& beta,
                               double tol) {
  const ParallelReport r = c_functions(X, alpha, beta, tol);
  return {r.pass, r.constant};
}

Slice extract_slice(const FiniteCausalSpace& X, const LineSample& gamma, const RigidityOptions& opt) {
  check_shape(X);
  Slice out;
  out.tol_disc = resolve_tol_disc(gamma, opt);
  const std::size_t n = X.size();
  const auto table = busemann_table(X, gamma, out.tol_disc, opt.jobs);

  std::vector<std::optional<LineSample>> asym(n);
  parallel_for(n, opt.jobs, [&](std::size_t z) {
    if (table[z]) asym[z] = asymptote_from_table(X, gamma, table, z, opt.tol_exact, out.tol_disc, opt.allow_unsettled);
  });
  for (std::size_t z = 0; z < n; ++z) out.unsettled += asym[z] && !asym[z]->settled ? 1 : 0;
  for (std::size_t z = 0; z < n; ++z) {
    if (table[z]) out.tol_identity = std::max(out.tol_identity, std::max(opt.tol_exact, 3.0 * table[z]->fit_rms));
  }

  // Points with identical asymptotes share a group; groups are numbered by
  // their lowest member.
  std::map<std::vector<std::size_t>, std::size_t> by_set;
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::size_t> rep;
  std::vector<long> group(n, -1);
  for (std::size_t z = 0; z < n; ++z) {
    if (!asym[z]) continue;
    std::vector<std::size_t> key = asym[z]->chain.points;
    std::sort(key.begin(), key.end());
    auto [it, fresh] = by_set.emplace(std::move(key), members.size());
    if (fresh) {
      members.emplace_back();
      rep.push_back(z);
    }
    members[it->second].push_back(z);
    group[z] = static_cast<long>(it->second);
  }
  const std::size_t m = members.size();
  if (m == 0) throw Error(ErrorCode::extraction, kModule, "no point of the space lies in I(gamma)");

  std::vector<double> c(m * m, 0.0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) pairs.emplace_back(a, b);
  }
  parallel_for(pairs.size(), opt.jobs, [&](std::size_t k) {
    const auto [a, b] = pairs[k];
    try {
      c[a * m + b] = c[b * m + a] = c_functions(X, *asym[rep[a]], *asym[rep[b]], out.tol_disc).constant;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::empty_domain) throw;
      throw Error(ErrorCode::extraction, kModule,
                  "asymptotes through " + X.labels[rep[a]] + " and " + X.labels[rep[b]] + " never meet causally");
    }
  });

  // Merge groups closer than half the smallest clearly nonzero distance.
  double cmin = kInf;
  for (double v : c) {
    if (v > opt.tol_exact) cmin = std::min(cmin, v);
  }
  const double cut = std::isfinite(cmin) ? 0.5 * cmin : opt.tol_exact;
  std::vector<std::size_t> root(m);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](std::size_t a) {
    while (root[a] != a) a = root[a] = root[root[a]];
    return a;
  };
  for (const auto& [a, b] : pairs) {
    if (c[a * m + b] < cut || c[a * m + b] <= opt.tol_exact) {
      const std::size_t ra = find(a), rb = find(b);
      root[std::max(ra, rb)] = std::min(ra, rb);
    }
  }
  std::vector<long> slice_of(m, -1);
  std::vector<std::size_t> heads;
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t r = find(a);
    if (slice_of[r] < 0) {
      slice_of[r] = static_cast<long>(heads.size());
      heads.push_back(r);
    }
    slice_of[a] = slice_of[r];
  }

  const std::size_t k = heads.size();
  out.group_of.assign(n, -1);
  for (std::size_t z = 0; z < n; ++z) {
    if (group[z] >= 0) out.group_of[z] = slice_of[static_cast<std::size_t>(group[z])];
  }
  out.points.resize(k);
  for (std::size_t z = 0; z < n; ++z) {
    if (out.group_of[z] >= 0) out.points[static_cast<std::size_t>(out.group_of[z])].members.push_back(z);
  }
  out.metric.labels.resize(k);
  out.metric.dist.assign(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const LineSample& a = *asym[rep[heads[i]]];
    out.asymptotes.push_back(a);
    SlicePoint& sp = out.points[i];
    // Busemann-zero point, linear in the parameter.
    const auto& par = a.param;
    if (par.front() > 0.0 || par.back() < 0.0) {
      throw Error(ErrorCode::extraction, kModule, "asymptote through " + X.labels[rep[heads[i]]] + " misses b = 0");
    }
    std::size_t lo = 0;
    while (lo + 1 < par.size() && par[lo + 1] <= 0.0) ++lo;
    sp.below = lo;
    sp.above = std::min(lo + 1, par.size() - 1);
    sp.fraction = sp.above == lo || par[sp.above] == par[lo] ? 0.0 : (0.0 - par[lo]) / (par[sp.above] - par[lo]);
    sp.label = X.labels[a.point(sp.fraction <= 0.5 ? sp.below : sp.above)];
    out.metric.labels[i] = sp.label;
    for (std::size_t j = 0; j < k; ++j) {
      if (i != j) out.metric.dist[i * k + j] = c[heads[i] * m + heads[j]];
    }
  }
  out.metric_report = validate_metric(out.metric, out.tol_disc);
  if (!out.metric_report.pass) {
    const Violation& v = out.metric_report.violations.front();
    throw Error(ErrorCode::extraction, kModule,
                "slice distance fails the " + v.kind + " axiom at " + out.metric.labels[v.i] + ", " +
                    out.metric.labels[v.j]);
  }
  return out;
}

SplittingResult build_splitting(const FiniteCausalSpace& X, const LineSample& gamma, const RigidityOptions& opt) {
  SplittingResult r;
  r.slice = extract_slice(X, gamma, opt);
  r.tolerance = r.slice.tol_disc;
  const FiniteMetricSpace& S = r.slice.metric;
  for (std::size_t g = 0; g < r.slice.asymptotes.size(); ++g) {
    const LineSample& a = r.slice.asymptotes[g];
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (std::abs(a.param[k]) < kPi / 2) r.samples.push_back({a.param[k], g, a.point(k)});
    }
  }
  const std::size_t ns = r.samples.size();
  const WarpingSpec f = WarpingSpec::cosine();
  struct Row {
    double worst = 0.0;
    std::size_t j = 0;
    std::size_t mismatches = 0;
    std::vector<std::size_t> bad;
  };
  std::vector<Row> rows(ns);
  parallel_for(ns, opt.jobs, [&](std::size_t i) {
    const MapSample& u = r.samples[i];
    Row& row = rows[i];
    for (std::size_t j = 0; j < ns; ++j) {
      if (i == j) continue;
      const MapSample& w = r.samples[j];
      const double d = S.d(u.slice_point, w.slice_point);
      const double tw = forward(comparison_space_tau(f, u.s, w.s, d));
      const double diff = std::abs(X.t(u.index, w.index) - tw);
      if (!(diff <= row.worst)) {
        row.worst = diff;
        row.j = j;
      }
      const bool le = X.le(u.index, w.index);
      const bool loose = forward_causal(comparison_space_tau(f, u.s, w.s, std::max(0.0, d - kMismatchMargin)));
      const bool strict = forward_causal(comparison_space_tau(f, u.s, w.s, d + kMismatchMargin));
      if ((le && !loose) || (!le && strict)) {
        ++row.mismatches;
        if (row.bad.size() < 64) row.bad.push_back(j);
      }
    }
  });
  for (std::size_t i = 0; i < ns; ++i) {
    r.pairs += ns - 1;
    if (rows[i].worst > r.residual || std::isnan(rows[i].worst)) {
      r.residual = rows[i].worst;
      r.residual_i = r.samples[i].index;
      r.residual_j = r.samples[rows[i].j].index;
    }
    r.mismatches += rows[i].mismatches;
    for (std::size_t j : rows[i].bad) {
      if (r.mismatch_list.size() < 64) r.mismatch_list.emplace_back(r.samples[i].index, r.samples[j].index);
    }
  }
  r.pass = r.residual <= r.tolerance && r.mismatches == 0;
  return r;
}

ComparisonReport stacking_audit(const FiniteCausalSpace& X, const LineSample& gamma, std::size_t p,
                                std::size_t k1, std::size_t k2, std::size_t k3, double tol) {
  check_shape(X);
  if (!(k1 < k2 && k2 < k3 && k3 < gamma.size())) {
    throw Error(ErrorCode::configuration, kModule, "stacking needs k1 < k2 < k3 on the line");
  }
  if (p >= X.size()) throw Error(ErrorCode::parameter, kModule, "point index out of range");
  if (on_line(gamma, p)) throw Error(ErrorCode::degenerate, kModule, "point lies on the line; triangles are degenerate");
  const std::size_t y1 = gamma.point(k1), y2 = gamma.point(k2), y3 = gamma.point(k3);
  for (std::size_t y : {y1, y2, y3}) {
    if (!(pair_tau(X, p, y) > 0.0)) throw Error(ErrorCode::configuration, kModule, "line sample not timelike related to the point");
  }
  const double h = 0.5 * pair_tau(X, p, y2);
  const AmbientPoint lower{-std::sin(h), std::cos(h), 0.0}, upper{std::sin(h), std::cos(h), 0.0};
  const bool p_first = X.ll(p, y2);
  const AmbientPoint pb = p_first ? lower : upper, y2b = p_first ? upper : lower;
  const AmbientPoint y1b = realize_from_anchors(pb, y2b, pair_tau(X, p, y1), X.t(y1, y2), 1);
  const AmbientPoint y3b = realize_from_anchors(pb, y2b, pair_tau(X, p, y3), X.t(y2, y3), -1);

  ComparisonReport rep;
  rep.check = "stacking";
  rep.tolerance = tol;
  const double t12 = forward(ambient_tau(y1b, y2b)), t23 = forward(ambient_tau(y2b, y3b));
  const double t13 = forward(ambient_tau(y1b, y3b));
  auto judge = [&](double lhs, double rhs, std::size_t i, std::size_t j, const char* kind) {
    ++rep.checked;
    const double dev = std::abs(lhs - rhs);
    if (dev > tol) rep.record({i, j, lhs, rhs, dev, kind});
    else rep.max_deficit = std::max(rep.max_deficit, dev);
  };
  judge(t13, t12 + t23, y1, y3, "collinearity");
  judge(t13, X.t(y1, y3), y1, y3, "third_side");

  // The comparison angle at y2 between p and gamma(t) does not depend on t.
  double lo = kInf, hi = -kInf;
  std::size_t defined = 0;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    const std::size_t g = gamma.point(k);
    if (k == k2 || !(pair_tau(X, p, g) > 0.0)) continue;
    try {
      const double w =
          comparison_angle(X.t(p, y2), X.t(y2, p), X.t(y2, g), X.t(g, y2), X.t(p, g), X.t(g, p)).omega;
      lo = std::min(lo, w);
      hi = std::max(hi, w);
      ++defined;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::undefined_angle && e.code() != ErrorCode::size_bound &&
          e.code() != ErrorCode::infeasible) {
        throw;
      }
    }
  }
  if (defined >= 2) judge(hi, lo, p, y2, "angle_spread");
  rep.note("angle_samples", static_cast<double>(defined));
  rep.note("angle", defined ? lo : 0.0);
  rep.finish();
  return rep;
}

ComparisonReport check_slice_alexandrov(const FiniteMetricSpace& S, double tol) {
  ComparisonReport rep;
  rep.check = "slice_alexandrov";
  rep.tolerance = tol;
  const std::size_t n = S.size();
  std::size_t skipped = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = b + 1; c < n; ++c) {
        for (std::size_t d = c + 1; d < n; ++d) {
          if (a == b || a == c || a == d) continue;
          const double ab = S.d(a, b), ac = S.d(a, c), ad = S.d(a, d);
          const double bc = S.d(b, c), bd = S.d(b, d), cd = S.d(c, d);
          if (std::min({ab, ac, ad, bc, bd, cd}) <= 0.0) {
            ++skipped;
            continue;
          }
          ++rep.checked;
          const double sum = hyperbolic_vertex_angle(ab, ac, bc) + hyperbolic_vertex_angle(ac, ad, cd) +
                             hyperbolic_vertex_angle(ab, ad, bd);
          const double excess = sum - 2.0 * kPi;
          if (excess > tol) rep.record({a, b, sum, 2.0 * kPi, excess, "angle_sum"});
          else rep.max_deficit = std::max(rep.max_deficit, excess);
        }
      }
    }
  }
  rep.note("skipped_degenerate", static_cast<double>(skipped));
  rep.finish();
  return rep;
}

}  // namespace llk
