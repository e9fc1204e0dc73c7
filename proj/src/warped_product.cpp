#include "llk/warped_product.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/tools/toms748_solve.hpp>

#include "llk/errors.hpp"
#include "llk/parallel.hpp"

namespace llk {

namespace {

const char* const kModule = "warped_product";

// One linear piece of a tabulated warping function.
struct Piece {
  double h, u0, u1;
};

std::vector<Piece> pieces(const WarpingSpec& f, double s, double t) {
  std::vector<Piece> out;
  double cur = s;
  double fcur = f(s);
  auto it = std::upper_bound(f.knots.begin(), f.knots.end(), s);
  for (; it != f.knots.end() && *it < t; ++it) {
    const double fk = f.values[static_cast<std::size_t>(it - f.knots.begin())];
    out.push_back({*it - cur, fcur, fk});
    cur = *it;
    fcur = fk;
  }
  out.push_back({t - cur, fcur, f(t)});
  return out;
}

// asinh(z)/z and log1p(r)/r, continuous through zero.
double asinhc(double z) { return std::abs(z) < 1e-8 ? 1.0 - z * z / 6.0 : std::asinh(z) / z; }
double log1pc(double r) { return std::abs(r) < 1e-8 ? 1.0 - 0.5 * r : std::log1p(r) / r; }

// Exact integrals over the interpolant for the timelike geodesic with
// Clairaut constant k = f^2 dx/dtau, parametrized by t.
double table_offset(const std::vector<Piece>& ps, double k) {
  double x = 0.0;
  for (const Piece& p : ps) {
    if (p.h <= 0.0) continue;
    const double s0 = std::hypot(p.u0, k), s1 = std::hypot(p.u1, k);
    const double w = p.h * k * (p.u0 + p.u1) / ((s0 + s1) * p.u0 * p.u1);
    const double z = (p.u1 - p.u0) / p.h * w;
    x += w * asinhc(z);
  }
  return x;
}

double table_tau(const std::vector<Piece>& ps, double k) {
  double tau = 0.0;
  for (const Piece& p : ps) {
    if (p.h <= 0.0) continue;
    tau += p.h * (p.u0 + p.u1) / (std::hypot(p.u0, k) + std::hypot(p.u1, k));
  }
  return tau;
}

double table_null_offset(const std::vector<Piece>& ps) {
  double x = 0.0;
  for (const Piece& p : ps) {
    if (p.h <= 0.0) continue;
    x += p.h / p.u0 * log1pc((p.u1 - p.u0) / p.u0);
  }
  return x;
}

IntervalResult table_forward(const WarpingSpec& f, double s, double t, double dx) {
  if (s == t) return dx == 0.0 ? IntervalResult{Relation::null, 0.0} : IntervalResult{Relation::unrelated, 0.0};
  const std::vector<Piece> ps = pieces(f, s, t);
  const double budget = table_null_offset(ps);
  if (dx > budget * (1.0 + kSlack)) return {Relation::unrelated, 0.0};
  if (dx >= budget * (1.0 - kSlack)) return {Relation::null, 0.0};
  if (dx == 0.0) return {Relation::timelike, t - s};

  double scale = 0.0;
  for (const Piece& p : ps) scale = std::max({scale, p.u0, p.u1});
  // The offset grows monotonically from 0 (k = 0) to the null budget
  // (k -> inf), so the bracket [0, pi/2] in theta = atan(k/scale) always holds.
  auto g = [&](double theta) { return table_offset(ps, scale * std::tan(theta)) - dx; };
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(g, 0.0, kPi / 2, -dx, budget - dx,
                                                      boost::math::tools::eps_tolerance<double>(50), iters);
  if (iters >= 200) throw Error(ErrorCode::convergence, kModule, "shooting did not converge");
  const double theta = 0.5 * (root.first + root.second);
  return {Relation::timelike, table_tau(ps, scale * std::tan(theta))};
}

IntervalResult forward_tau(const WarpingSpec& f, double s, double t, double dx) {
  switch (f.kind) {
    case WarpingSpec::Kind::cos:
      return ads_interval({s, 0.0}, {t, dx});
    case WarpingSpec::Kind::constant: {
      const double dt = t - s;
      const double vx = f.value * dx;
      if (dt == 0.0 && dx == 0.0) return {Relation::null, 0.0};
      const double diff = (dt - vx) * (dt + vx);
      const double scale = dt * dt + vx * vx;
      if (diff < -kSlack * scale) return {Relation::unrelated, 0.0};
      if (std::abs(diff) <= kSlack * scale) return {Relation::null, 0.0};
      return {Relation::timelike, std::sqrt(diff)};
    }
    case WarpingSpec::Kind::table:
      return table_forward(f, s, t, dx);
  }
  return {};
}

void require_inside(const WarpingSpec& f, double t) {
  if (!f.contains(t)) throw Error(ErrorCode::domain, kModule, "time " + std::to_string(t) + " outside the interval");
}

}  // namespace

const char* warping_kind_name(WarpingSpec::Kind k) {
  switch (k) {
    case WarpingSpec::Kind::cos: return "cos";
    case WarpingSpec::Kind::constant: return "constant";
    case WarpingSpec::Kind::table: return "table";
  }
  return "unknown";
}

WarpingSpec WarpingSpec::cosine() { return WarpingSpec{}; }

WarpingSpec WarpingSpec::constant(double v, double a, double b) {
  WarpingSpec f;
  f.kind = Kind::constant;
  f.value = v;
  f.a = a;
  f.b = b;
  return f;
}

WarpingSpec WarpingSpec::table(std::vector<double> knots, std::vector<double> values,
                               std::optional<std::pair<double, double>> interval) {
  WarpingSpec f;
  f.kind = Kind::table;
  f.knots = std::move(knots);
  f.values = std::move(values);
  if (interval) {
    f.a = interval->first;
    f.b = interval->second;
  } else if (!f.knots.empty()) {
    f.a = f.knots.front();
    f.b = f.knots.back();
  }
  return f;
}

void WarpingSpec::validate() const {
  if (!(a < b)) throw Error(ErrorCode::parameter, kModule, "empty interval");
  switch (kind) {
    case Kind::cos:
      if (a != -kPi / 2 || b != kPi / 2) throw Error(ErrorCode::parameter, kModule, "cos warping lives on (-pi/2, pi/2)");
      break;
    case Kind::constant:
      if (!(value > 0.0) || !std::isfinite(value)) throw Error(ErrorCode::parameter, kModule, "constant warping must be positive");
      break;
    case Kind::table:
      if (knots.size() < 2 || knots.size() != values.size()) {
        throw Error(ErrorCode::parameter, kModule, "table needs matching knots and values, at least two");
      }
      for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i])) throw Error(ErrorCode::parameter, kModule, "table values must be positive");
        if (i > 0 && !(knots[i] > knots[i - 1])) throw Error(ErrorCode::parameter, kModule, "table knots must increase strictly");
      }
      if (knots.front() > a || knots.back() < b) throw Error(ErrorCode::parameter, kModule, "table knots must span the interval");
      break;
  }
}

double WarpingSpec::operator()(double t) const {
  switch (kind) {
    case Kind::cos: return std::cos(t);
    case Kind::constant: return value;
    case Kind::table: {
      if (t <= knots.front()) return values.front();
      if (t >= knots.back()) return values.back();
      const auto it = std::upper_bound(knots.begin(), knots.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - knots.begin());
      const double w = (t - knots[i - 1]) / (knots[i] - knots[i - 1]);
      return values[i - 1] + w * (values[i] - values[i - 1]);
    }
  }
  return 0.0;
}

std::size_t FiniteMetricSpace::index_of(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw Error(ErrorCode::lookup, kModule, "unknown base point '" + label + "'");
  return static_cast<std::size_t>(it - labels.begin());
}

ComparisonReport validate_metric(const FiniteMetricSpace& Y, double tol) {
  const std::size_t n = Y.size();
  if (Y.dist.size() != n * n) throw Error(ErrorCode::structural, kModule, "distance matrix does not match labels");
  ComparisonReport r;
  r.check = "metric";
  r.tolerance = tol;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dij = Y.d(i, j);
      ++r.checked;
      if (!std::isfinite(dij) || dij < 0.0) {
        r.record({i, j, dij, 0.0, -dij, "nonnegativity"});
      } else if (i == j && dij != 0.0) {
        r.record({i, j, dij, 0.0, dij, "diagonal"});
      } else if (i != j && !(dij > 0.0)) {
        r.record({i, j, dij, 0.0, 0.0, "positivity"});
      } else if (std::abs(dij - Y.d(j, i)) > tol) {
        r.record({i, j, dij, Y.d(j, i), std::abs(dij - Y.d(j, i)), "symmetry"});
      }
      for (std::size_t k = 0; k < n; ++k) {
        const double via = Y.d(i, k) + Y.d(k, j);
        if (dij > via + tol) r.record({i, j, dij, via, dij - via, "triangle"});
      }
    }
  }
  r.finish();
  return r;
}

FiniteMetricSpace circle_net(std::size_t n, double circumference) {
  FiniteMetricSpace Y;
  Y.dist.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Y.labels.push_back("c" + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t steps = i > j ? i - j : j - i;
      const double arc = circumference * static_cast<double>(steps) / static_cast<double>(n);
      Y.dist[i * n + j] = std::min(arc, circumference - arc);
    }
  }
  return Y;
}

double null_offset(const WarpingSpec& f, double t0, double t1) {
  require_inside(f, t0);
  require_inside(f, t1);
  if (t1 < t0) throw Error(ErrorCode::parameter, kModule, "null_offset needs t0 <= t1");
  switch (f.kind) {
    case WarpingSpec::Kind::cos: return conformal_time(t1) - conformal_time(t0);
    case WarpingSpec::Kind::constant: return (t1 - t0) / f.value;
    case WarpingSpec::Kind::table: return t1 == t0 ? 0.0 : table_null_offset(pieces(f, t0, t1));
  }
  return 0.0;
}

IntervalResult comparison_space_tau(const WarpingSpec& f, double s, double t, double dx) {
  require_inside(f, s);
  require_inside(f, t);
  dx = std::abs(dx);
  if (s > t) {
    const IntervalResult back = forward_tau(f, t, s, dx);
    if (back.causal()) return {Relation::past_directed, back.tau};
    return {Relation::unrelated, 0.0};
  }
  return forward_tau(f, s, t, dx);
}

IntervalResult wp_interval(const WarpingSpec& f, const FiniteMetricSpace& Y, const WarpedPoint& p,
                           const WarpedPoint& q) {
  const std::size_t i = Y.index_of(p.base);
  const std::size_t j = Y.index_of(q.base);
  return comparison_space_tau(f, p.t, q.t, Y.d(i, j));
}

FiniteCausalSpace sample_warped_product(const WarpingSpec& f, const FiniteMetricSpace& Y,
                                        const std::vector<double>& t_grid, int jobs) {
  f.validate();
  const ComparisonReport metric = validate_metric(Y);
  if (!metric.pass) {
    const Violation& v = metric.violations.front();
    throw Error(ErrorCode::validation, kModule,
                "base is not a metric space (" + v.kind + " at " + std::to_string(v.i) + "," + std::to_string(v.j) + ")");
  }
  if (t_grid.empty()) throw Error(ErrorCode::parameter, kModule, "empty time grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    require_inside(f, t_grid[i]);
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw Error(ErrorCode::parameter, kModule, "time grid must increase strictly");
  }

  const std::size_t nb = Y.size(), nt = t_grid.size(), n = nb * nt;
  std::vector<double> distinct(Y.dist);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::size_t> dist_id(nb * nb);
  for (std::size_t k = 0; k < nb * nb; ++k) {
    dist_id[k] = static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), Y.dist[k]) - distinct.begin());
  }

  // Strip separations for every forward time pair and distinct distance.
  const std::size_t nd = distinct.size();
  std::vector<IntervalResult> strip(nt * nt * nd);
  parallel_for(nt, jobs, [&](std::size_t i) {
    for (std::size_t j = i; j < nt; ++j) {
      for (std::size_t k = 0; k < nd; ++k) strip[(i * nt + j) * nd + k] = forward_tau(f, t_grid[i], t_grid[j], distinct[k]);
    }
  });

  FiniteCausalSpace X = FiniteCausalSpace::sized(n);
  X.coords.resize(n);
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t b = 0; b < nb; ++b) {
      X.labels[i * nb + b] = Y.labels[b] + "@" + std::to_string(i);
      X.coords[i * nb + b] = {t_grid[i], static_cast<double>(b)};
    }
  }
  parallel_for(n, jobs, [&](std::size_t p) {
    const std::size_t i = p / nb, bp = p % nb;
    for (std::size_t j = i; j < nt; ++j) {
      for (std::size_t bq = 0; bq < nb; ++bq) {
        const IntervalResult& r = strip[(i * nt + j) * nd + dist_id[bp * nb + bq]];
        const std::size_t q = j * nb + bq;
        X.leq[p * n + q] = r.causal() ? 1 : 0;
        X.tau[p * n + q] = r.relation == Relation::timelike ? r.tau : 0.0;
      }
    }
  });
  return X;
}

FiniteCausalSpace sample_suspension(const FiniteMetricSpace& S, const std::vector<double>& t_grid, int jobs) {
  return sample_warped_product(WarpingSpec::cosine(), S, t_grid, jobs);
}

std::vector<double> suspension_grid(std::size_t n, double margin) {
  if (n == 0) return {};
  if (n == 1) return {0.0};
  std::vector<double> g(n);
  const double lo = -kPi / 2 + margin, hi = kPi / 2 - margin;
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

}  // namespace llk
