#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixture_spaces.hpp"
#include "llk/causal_space.hpp"
#include "llk/warped_product.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace llk;
using support::expect_code;

namespace {

FiniteCausalSpace circle_suspension() { return sample_suspension(circle_net(12, 4.0), suspension_grid(21, 0.05)); }

FiniteCausalSpace flat_strip() {
  return sample_warped_product(WarpingSpec::constant(1.0), circle_net(12, 4.0), suspension_grid(21, 0.05));
}

FiniteCausalSpace three_points(double t01, double t12, double t02) {
  FiniteCausalSpace X = FiniteCausalSpace::sized(3);
  X.labels = {"a", "b", "c"};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i; j < 3; ++j) X.leq[i * 3 + j] = 1;
  }
  X.tau[1] = t01;
  X.tau[5] = t12;
  X.tau[2] = t02;
  return X;
}

std::vector<Triangle> draw(const FiniteCausalSpace& X, std::size_t want, std::uint64_t seed = 0) {
  std::vector<Triangle> out;
  for (std::uint64_t item = 0; out.size() < want && item < 50 * want; ++item) {
    const TriangleSample s = sample_triangle(X, seed, item);
    if (s.found) out.push_back(s.triangle);
  }
  return out;
}

// Vertex at (-0.9, 0) with one vertical and one tilted geodesic leaving it.
struct Fan {
  FiniteCausalSpace X;
  Chain alpha, beta;
  double omega;
};

Fan ads_fan(double omega, std::size_t n = 8) {
  std::vector<AdsPoint> pts{{-0.9, 0.0}};
  for (std::size_t k = 1; k <= n; ++k) pts.push_back(support::ads_ray(pts[0], 0.0, 0.2 * k));
  for (std::size_t k = 1; k <= n; ++k) pts.push_back(support::ads_ray(pts[0], omega, 0.17 * k));
  Fan f{support::ads_space(pts), {}, {}, omega};
  std::vector<std::size_t> a{0}, b{0};
  for (std::size_t k = 1; k <= n; ++k) {
    a.push_back(k);
    b.push_back(n + k);
  }
  f.alpha = make_chain(f.X, a);
  f.beta = make_chain(f.X, b);
  return f;
}

}  // namespace

TEST(Validate, SuspensionPasses) {
  const ComparisonReport r = validate_space(circle_suspension(), 1e-9, 4);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.checked, 0u);
}

TEST(Validate, ReverseTriangleViolation) {
  const ComparisonReport r = validate_space(three_points(0.5, 0.5, 0.8));
  EXPECT_FALSE(r.pass);
  bool seen = false;
  for (const auto& v : r.violations) seen |= v.kind == "reverse_triangle";
  EXPECT_TRUE(seen);
  EXPECT_TRUE(validate_space(three_points(0.5, 0.5, 1.2)).pass);
}

TEST(Validate, TimelikeWithoutCausal) {
  FiniteCausalSpace X = three_points(0.5, 0.5, 1.2);
  X.leq[1] = 0;
  const ComparisonReport r = validate_space(X);
  EXPECT_FALSE(r.pass);
  bool seen = false;
  for (const auto& v : r.violations) seen |= v.kind == "timelikeness";
  EXPECT_TRUE(seen);
}

TEST(Validate, ShapeMismatchIsStructural) {
  FiniteCausalSpace X = three_points(0.5, 0.5, 1.2);
  X.tau.pop_back();
  expect_code(ErrorCode::structural, [&] { validate_space(X); });
}

TEST(Validate, JobsGiveIdenticalReports) {
  const FiniteCausalSpace X = flat_strip();
  const ComparisonReport a = validate_space(X, 1e-9, 1), b = validate_space(X, 1e-9, 7);
  EXPECT_EQ(a.checked, b.checked);
  EXPECT_EQ(a.violation_count, b.violation_count);
  EXPECT_EQ(a.pass, b.pass);
}

TEST(LongestChain, TwoPoints) {
  const FiniteCausalSpace X = support::ads_space({{-0.5, 0.0}, {0.5, 0.1}});
  const Chain c = longest_chain(X, 0, 1);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.value(), X.t(0, 1));
}

TEST(LongestChain, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> t(-1.2, 1.2), x(-0.6, 0.6);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + trial % 5;
    FiniteCausalSpace X;
    if (trial % 2) {
      std::vector<AdsPoint> pts;
      for (std::size_t k = 0; k < n; ++k) pts.push_back({t(rng), x(rng)});
      X = support::ads_space(pts);
    } else {
      std::vector<support::MinkPoint> pts;
      for (std::size_t k = 0; k < n; ++k) pts.push_back({t(rng), x(rng)});
      X = support::minkowski_space(pts);
    }
    ASSERT_TRUE(validate_space(X).pass);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || !X.le(i, j)) continue;
        const Chain c = longest_chain(X, i, j);
        EXPECT_NEAR(c.value(), oracle::longest_chain_value(X, i, j), 1e-12);
        EXPECT_LE(c.value(), X.t(i, j) + 1e-9);
        EXPECT_EQ(c.front(), i);
        EXPECT_EQ(c.back(), j);
      }
    }
  }
}

TEST(LongestChain, TiesGoToSmallestIndices) {
  // Two equally heavy routes 0 -> {1 or 2} -> 3.
  FiniteCausalSpace X = FiniteCausalSpace::sized(4);
  X.labels = {"a", "b", "c", "d"};
  auto set = [&](std::size_t i, std::size_t j, double v) {
    X.leq[i * 4 + j] = 1;
    X.tau[i * 4 + j] = v;
  };
  for (std::size_t i = 0; i < 4; ++i) set(i, i, 0.0);
  set(0, 1, 0.5);
  set(0, 2, 0.5);
  set(1, 3, 0.5);
  set(2, 3, 0.5);
  set(0, 3, 1.0);
  const Chain c = longest_chain(X, 0, 3);
  EXPECT_EQ(c.points, (std::vector<std::size_t>{0, 1, 3}));
}

TEST(LongestChain, Errors) {
  const FiniteCausalSpace X = support::ads_space({{0.0, 0.0}, {0.0, 1.0}});
  expect_code(ErrorCode::no_chain, [&] { longest_chain(X, 0, 1); });
  FiniteCausalSpace Y = three_points(0.0, 0.0, 0.0);
  Y.leq[3 * 2 + 0] = 1;  // c <= a closes a cycle
  expect_code(ErrorCode::causality, [&] { longest_chain(Y, 0, 2); });
}

TEST(LongestChain, DiamondCornerToCorner) {
  for (std::size_t n : {11u, 21u}) {
    const FiniteCausalSpace X = fixtures::ads_diamond(n, 2.0);
    const std::size_t lo = 0, hi = n * n - 1;
    const Chain c = longest_chain(X, lo, hi);
    EXPECT_NEAR(c.value(), X.t(lo, hi), 1e-12);
    EXPECT_LT(X.t(lo, hi), kPi);
  }
}

TEST(LongestChain, ParamsAreCumulativeTau) {
  const FiniteCausalSpace X = circle_suspension();
  const Chain c = longest_chain(X, 2, 250);
  for (std::size_t k = 1; k < c.size(); ++k) {
    EXPECT_NEAR(c.params[k] - c.params[k - 1], X.t(c.points[k - 1], c.points[k]), 1e-15);
  }
}

TEST(Triangle, ConfigurationErrors) {
  const FiniteCausalSpace X = support::ads_space({{-0.5, 0.0}, {0.5, 0.0}, {0.0, 2.0}});
  expect_code(ErrorCode::configuration, [&] { make_triangle(X, 0, 1, 2); });
  const FiniteCausalSpace far = three_points(1.6, 1.6, 3.2);
  expect_code(ErrorCode::size_bound, [&] { make_triangle(far, 0, 1, 2); });
}

TEST(Triangle, ModelSpaceGivesEquality) {
  const FiniteCausalSpace X = fixtures::ads_diamond(21, 2.0);
  const auto tris = draw(X, 100);
  ASSERT_EQ(tris.size(), 100u);
  for (const Triangle& t : tris) {
    const ComparisonReport r = check_triangle_comparison(X, t, 1e-6, chain_budget(X));
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.max_deficit, 1e-6);
    EXPECT_LE(r.max_excess, 1e-6);
  }
}

TEST(Triangle, SuspensionSatisfiesLowerBound) {
  const FiniteCausalSpace X = circle_suspension();
  for (const Triangle& t : draw(X, 40)) EXPECT_TRUE(check_triangle_comparison(X, t, 1e-8, chain_budget(X)).pass);
}

TEST(Triangle, FlatStripViolates) {
  const FiniteCausalSpace X = flat_strip();
  std::size_t failing = 0;
  const auto tris = draw(X, 40);
  for (const Triangle& t : tris) failing += check_triangle_comparison(X, t, 1e-8, chain_budget(X)).pass ? 0 : 1;
  EXPECT_GT(failing, 0u);
}

TEST(Triangle, LossyChainsAreStale) {
  // The long side detours through q, off the geodesic from p to f.
  const FiniteCausalSpace X = support::ads_space({{-0.8, 0.0}, {0.0, 0.3}, {0.8, 0.0}, {0.0, -0.4}});
  Triangle t = make_triangle(X, 0, 1, 2);
  t.pf = make_chain(X, {0, 3, 2});
  ASSERT_GT(t.loss(X), 1e-3);
  expect_code(ErrorCode::stale_chain, [&] { check_triangle_comparison(X, t, 1e-8, 1e-9); });
  EXPECT_NO_THROW(check_triangle_comparison(X, t, 1e-8, 1.0));
}

TEST(Triangle, ChainBudgetIsTwiceTheTimeStep) {
  const FiniteCausalSpace X = circle_suspension();
  const std::vector<double> g = suspension_grid(21, 0.05);
  EXPECT_NEAR(chain_budget(X), 2.0 * (g[1] - g[0]), 1e-12);
  FiniteCausalSpace Y = X;
  Y.coords.clear();
  EXPECT_EQ(chain_budget(Y), kInf);
}

TEST(Monotonicity, ModelFanIsConstant) {
  const Fan f = ads_fan(0.6);
  const ComparisonReport r = check_monotonicity(f.X, 0, f.alpha, f.beta, 1e-8);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.note_value("spread"), 1e-6);
  EXPECT_LE(r.note_value("total_variation"), 1e-5);
  EXPECT_GT(r.note_value("defined"), 10.0);
}

TEST(Monotonicity, SuspensionIsMonotone) {
  const FiniteCausalSpace X = circle_suspension();
  std::size_t checked = 0;
  for (const Triangle& t : draw(X, 30)) {
    try {
      const ComparisonReport r = check_monotonicity(X, t.past, t.pm, t.pf, 1e-8);
      EXPECT_TRUE(r.pass);
      ++checked;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::empty_domain);
    }
  }
  EXPECT_GT(checked, 10u);
}

TEST(Monotonicity, MinkowskiFanFails) {
  // Straight lines from the origin: theta decreases along the sides.
  std::vector<support::MinkPoint> pts{{0.0, 0.0}};
  for (int k = 1; k <= 6; ++k) pts.push_back({0.3 * k, 0.0});
  for (int k = 1; k <= 6; ++k) pts.push_back({0.3 * k, 0.15 * k});
  const FiniteCausalSpace X = support::minkowski_space(pts);
  const Chain a = make_chain(X, {0, 1, 2, 3, 4, 5, 6});
  const Chain b = make_chain(X, {0, 7, 8, 9, 10, 11, 12});
  EXPECT_FALSE(check_monotonicity(X, 0, a, b, 1e-8).pass);
}

TEST(Monotonicity, EmptyDomain) {
  const FiniteCausalSpace X = support::ads_space({{-0.5, 0.0}, {0.0, 0.0}, {-0.2, 1.5}});
  const Chain a = make_chain(X, {0, 1});
  Chain b;
  b.points = {0, 2};
  b.params = {0.0, 0.0};
  expect_code(ErrorCode::empty_domain, [&] { check_monotonicity(X, 0, a, b, 1e-8); });
}

TEST(UpperAngle, SameChainAndVerticalPair) {
  const Fan f = ads_fan(0.0);
  EXPECT_NEAR(upper_angle_estimate(f.X, 0, f.alpha, f.alpha).value, 0.0, 1e-7);
  EXPECT_NEAR(upper_angle_estimate(f.X, 0, f.alpha, f.beta).value, 0.0, 1e-7);
}

TEST(UpperAngle, RapidityDifferenceMatchesTangents) {
  for (double w : {0.3, 0.8, 1.5}) {
    const Fan f = ads_fan(w, 5);
    const AngleEstimate e = upper_angle_estimate(f.X, 0, f.alpha, f.beta);
    const AdsPoint v{-0.9, 0.0};
    const double ref = oracle::rapidity_between(
        oracle::tangent([&](double s) { return support::ads_ray(v, 0.0, s); }, 0.0),
        oracle::tangent([&](double s) { return support::ads_ray(v, w, s); }, 0.0));
    EXPECT_NEAR(e.value, ref, 1e-6);
    EXPECT_LE(e.spread, 1e-6);
  }
}

TEST(Subdivision, ModelTrianglesAreDegenerate) {
  const FiniteCausalSpace X = fixtures::ads_diamond(15, 2.0);
  std::size_t done = 0;
  for (const Triangle& t : draw(X, 60)) {
    if (t.pf.size() < 3) continue;
    const std::size_t p = t.pf.points[t.pf.size() / 2];
    if (!(X.ll(p, t.middle) || X.ll(t.middle, p))) continue;
    const ComparisonReport r = check_subdivision(X, t, p, SubdivisionKind::across, 1e-8);
    EXPECT_TRUE(r.pass);
    EXPECT_GT(r.note_value("convex"), 0.5);
    EXPECT_GT(r.note_value("concave"), 0.5);
    ++done;
  }
  EXPECT_GT(done, 5u);
}

TEST(Subdivision, FlatStripIsConcave) {
  const FiniteCausalSpace X = flat_strip();
  std::size_t concave = 0, convex = 0;
  for (const Triangle& t : draw(X, 60)) {
    if (t.pf.size() < 3) continue;
    const std::size_t p = t.pf.points[t.pf.size() / 2];
    if (!(X.ll(p, t.middle) || X.ll(t.middle, p))) continue;
    const ComparisonReport r = check_subdivision(X, t, p, SubdivisionKind::across, 1e-8);
    const bool cx = r.note_value("convex") > 0.5, cc = r.note_value("concave") > 0.5;
    concave += cc && !cx;
    convex += cx && !cc;
  }
  EXPECT_GT(concave, 0u);
  EXPECT_EQ(convex, 0u);
}

TEST(Subdivision, SuspensionHoldsBothVersions) {
  const FiniteCausalSpace X = circle_suspension();
  std::size_t done = 0;
  for (const Triangle& t : draw(X, 60)) {
    for (const auto& [side, opp, kind] : {std::tuple{&t.pf, t.middle, SubdivisionKind::across},
                                          std::tuple{&t.pm, t.future, SubdivisionKind::future}}) {
      if (side->size() < 3) continue;
      const std::size_t p = side->points[side->size() / 2];
      if (!(X.ll(p, opp) || X.ll(opp, p))) continue;
      EXPECT_TRUE(check_subdivision(X, t, p, kind, 1e-8).pass);
      ++done;
    }
  }
  EXPECT_GT(done, 10u);
}

TEST(Subdivision, PointMustSitInsideTheRightSide) {
  const FiniteCausalSpace X = circle_suspension();
  for (const Triangle& t : draw(X, 20)) {
    if (t.pf.size() < 3) continue;
    expect_code(ErrorCode::configuration, [&] { check_subdivision(X, t, t.past, SubdivisionKind::across, 1e-8); });
    const std::size_t p = t.pf.points[1];
    bool on_short = false;
    for (const Chain* c : {&t.pm, &t.mf}) {
      for (std::size_t k = 1; k + 1 < c->size(); ++k) on_short |= c->points[k] == p;
    }
    if (!on_short) expect_code(ErrorCode::configuration, [&] { check_subdivision(X, t, p, SubdivisionKind::future, 1e-8); });
    return;
  }
}

TEST(Myers, SuspensionFlatAndDiamond) {
  const ComparisonReport s = myers_check(circle_suspension());
  EXPECT_TRUE(s.pass);
  EXPECT_LT(s.note_value("max_tau"), kPi);

  const FiniteCausalSpace h4 =
      sample_warped_product(WarpingSpec::constant(1.0), circle_net(12, 4.0), fixtures::linspace(-2.0, 2.0, 21));
  const ComparisonReport f = myers_check(h4);
  EXPECT_FALSE(f.pass);
  EXPECT_NEAR(f.note_value("max_tau"), 4.0, 1e-12);

  double last = 0.0;
  for (double R : {1.0, 2.0, 3.0, 4.0}) {
    const ComparisonReport d = myers_check(fixtures::ads_diamond(9, R));
    EXPECT_TRUE(d.pass);
    EXPECT_GT(d.note_value("max_tau"), last);
    last = d.note_value("max_tau");
  }
  EXPECT_GT(last, kPi - 0.1);
}

TEST(Sampling, TrianglesAreReproducible) {
  const FiniteCausalSpace X = circle_suspension();
  for (std::uint64_t item = 0; item < 20; ++item) {
    const TriangleSample a = sample_triangle(X, 5, item), b = sample_triangle(X, 5, item);
    EXPECT_EQ(a.found, b.found);
    EXPECT_EQ(a.triangle.pf.points, b.triangle.pf.points);
    EXPECT_EQ(a.triangle.middle, b.triangle.middle);
  }
  const ComparisonReport r1 = check_triangle_comparison(X, sample_triangle(X, 5, 3).triangle, 1e-8);
  const ComparisonReport r2 = check_triangle_comparison(X, sample_triangle(X, 5, 3).triangle, 1e-8);
  EXPECT_EQ(r1.checked, r2.checked);
  EXPECT_EQ(r1.max_deficit, r2.max_deficit);
  EXPECT_EQ(r1.max_excess, r2.max_excess);
}
