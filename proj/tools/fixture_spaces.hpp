#pragma once

// Builders for the committed fixtures and the golden-report table. Shared by
// make_fixtures and the test suite.

#include <cmath>
#include <string>
#include <vector>

#include "llk/cli.hpp"
#include "llk/model_space.hpp"
#include "llk/warped_product.hpp"

namespace llk::fixtures {

inline constexpr double kMargin = 0.05;

inline SpaceFile suspension_request(const FiniteMetricSpace& base, std::size_t times, double margin = kMargin) {
  SpaceFile f;
  f.kind = SpaceFile::Kind::suspension_request;
  f.request.warping = WarpingSpec::cosine();
  f.request.base = base;
  f.request.t_grid = suspension_grid(times, margin);
  return f;
}

inline FiniteMetricSpace two_points(double d) { return {{"a", "b"}, {0.0, d, d, 0.0}}; }
inline FiniteMetricSpace one_point() { return {{"o"}, {0.0}}; }

// Constant warping 1: a strip of Minkowski space over the base.
inline SpaceFile flat_strip(const FiniteMetricSpace& base, std::vector<double> t_grid) {
  SpaceFile f;
  f.kind = SpaceFile::Kind::suspension_request;
  f.request.warping = WarpingSpec::constant(1.0);
  f.request.base = base;
  f.request.t_grid = std::move(t_grid);
  return f;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

// AdS' points on a uniform grid of conformal null coordinates u, v in
// [-R, R]: eta = (u + v) / 2, x = (v - u) / 2. Index = i * n + j for (u_i, v_j).
inline FiniteCausalSpace ads_diamond(std::size_t n, double R) {
  const std::size_t N = n * n;
  FiniteCausalSpace X = FiniteCausalSpace::sized(N);
  X.coords.resize(N);
  const std::vector<double> g = linspace(-R, R, n);
  std::vector<AdsPoint> pts(N);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double u = g[i], v = g[j];
      pts[i * n + j] = {conformal_time_inv(0.5 * (u + v)), 0.5 * (v - u)};
      X.labels[i * n + j] = "u" + std::to_string(i) + "v" + std::to_string(j);
      X.coords[i * n + j] = {pts[i * n + j].t, pts[i * n + j].x};
    }
  }
  for (std::size_t p = 0; p < N; ++p) {
    for (std::size_t q = 0; q < N; ++q) {
      // Causality is exact on the null grid: p <= q iff u and v both grow.
      const std::size_t ip = p / n, jp = p % n, iq = q / n, jq = q % n;
      const bool le = ip <= iq && jp <= jq;
      X.leq[p * N + q] = le ? 1 : 0;
      if (le && ip < iq && jp < jq) {
        const IntervalResult r = ads_interval(pts[p], pts[q]);
        X.tau[p * N + q] = r.relation == Relation::timelike ? r.tau : 0.0;
      }
    }
  }
  return X;
}

struct NamedFixture {
  std::string name;
  SpaceFile file;
};

inline std::vector<NamedFixture> space_fixtures() {
  const FiniteMetricSpace circle = circle_net(12, 4.0);
  std::vector<NamedFixture> out;
  out.push_back({"suspension_circle12", suspension_request(circle, 21)});
  out.push_back({"suspension_two_point", suspension_request(two_points(1.0), 21)});
  out.push_back({"suspension_one_point", suspension_request(one_point(), 21)});
  out.push_back({"flat_strip", flat_strip(circle, suspension_grid(21, kMargin))});
  out.push_back({"flat_strip_h4", flat_strip(circle, linspace(-2.0, 2.0, 21))});
  SpaceFile diamond;
  diamond.kind = SpaceFile::Kind::finite_causal;
  diamond.space = ads_diamond(11, 2.0);
  out.push_back({"ads_diamond_11", diamond});
  return out;
}

inline std::string geodesic_request() {
  return "{\n  \"curves\": [\n    {\"omega\": 0.0, \"c\": 0.0},\n    {\"omega\": 1.3169578969248166, \"c\": 0.0},\n"
         "    {\"omega\": 0.5, \"c\": -1.0}\n  ]\n}\n";
}

struct GoldenCase {
  std::string fixture;  // file stem under fixtures/
  std::string command;
  std::string golden() const { return fixture + "." + command + (command == "geodesics" ? ".csv" : ".json"); }
};

inline std::vector<GoldenCase> golden_cases() {
  return {
      {"suspension_circle12", "validate"},  {"suspension_circle12", "curvature"},
      {"suspension_circle12", "myers"},     {"suspension_circle12", "subdivide"},
      {"suspension_circle12", "split"},     {"suspension_two_point", "validate"},
      {"suspension_two_point", "myers"},    {"suspension_two_point", "split"},
      {"suspension_two_point", "suspend"},  {"suspension_one_point", "validate"},
      {"suspension_one_point", "split"},    {"flat_strip", "validate"},
      {"flat_strip", "curvature"},          {"flat_strip", "myers"},
      {"flat_strip", "subdivide"},          {"flat_strip_h4", "myers"},
      {"ads_diamond_11", "validate"},       {"ads_diamond_11", "curvature"},
      {"ads_diamond_11", "myers"},          {"geodesics", "geodesics"},
  };
}

}  // namespace llk::fixtures
