#pragma once

// Lorentzian warped products I x_f Y over finite metric spaces. Causality and
// tau reduce to the two-dimensional strip I x_f R.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "llk/causal_space.hpp"
#include "llk/model_space.hpp"

namespace llk {

struct WarpingSpec {
  enum class Kind { cos, constant, table };

  Kind kind = Kind::cos;
  double value = 1.0;           // constant kind
  std::vector<double> knots;    // table kind
  std::vector<double> values;
  double a = -kPi / 2;          // open interval (a, b)
  double b = kPi / 2;

  static WarpingSpec cosine();
  static WarpingSpec constant(double v, double a = -kInf, double b = kInf);
  // Interval defaults to the knot span.
  static WarpingSpec table(std::vector<double> knots, std::vector<double> values,
                           std::optional<std::pair<double, double>> interval = std::nullopt);

  void validate() const;
  bool contains(double t) const { return t > a && t < b; }
  double operator()(double t) const;
};

const char* warping_kind_name(WarpingSpec::Kind k);

struct FiniteMetricSpace {
  std::vector<std::string> labels;
  std::vector<double> dist;  // row-major n x n

  std::size_t size() const { return labels.size(); }
  double d(std::size_t i, std::size_t j) const { return dist[i * size() + j]; }
  std::size_t index_of(const std::string& label) const;
};

ComparisonReport validate_metric(const FiniteMetricSpace& Y, double tol = 1e-9);

// Evenly spaced net of a circle with the intrinsic (shorter arc) metric.
FiniteMetricSpace circle_net(std::size_t n, double circumference);

struct WarpedPoint {
  double t = 0.0;
  std::string base;
};

double null_offset(const WarpingSpec& f, double t0, double t1);

IntervalResult comparison_space_tau(const WarpingSpec& f, double s, double t, double dx);

IntervalResult wp_interval(const WarpingSpec& f, const FiniteMetricSpace& Y, const WarpedPoint& p,
                           const WarpedPoint& q);

// One point per (t_i, base) pair, time-major: index = i * |Y| + base.
FiniteCausalSpace sample_warped_product(const WarpingSpec& f, const FiniteMetricSpace& Y,
                                        const std::vector<double>& t_grid, int jobs = 1);

FiniteCausalSpace sample_suspension(const FiniteMetricSpace& S, const std::vector<double>& t_grid,
                                    int jobs = 1);

// n times evenly spaced on [-pi/2 + margin, pi/2 - margin].
std::vector<double> suspension_grid(std::size_t n, double margin);

}  // namespace llk
