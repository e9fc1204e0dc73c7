#pragma once

// Splitting pipeline for sampled spaces carrying a timelike line of length
// (nearly) pi: Busemann functions, asymptotes, the c-criterion, the slice
// metric and the round trip onto the cos-suspension.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "llk/causal_space.hpp"
#include "llk/warped_product.hpp"

namespace llk {

struct RigidityOptions {
  double tol_exact = 1e-8;
  double tol_disc = -1.0;  // negative: twice the grid step of the line
  int jobs = 1;
  // When tail maximizers do not settle (noisy tau), build the asymptote from
  // the Busemann fit alone instead of raising a convergence error.
  bool allow_unsettled = false;
};

// A sampled line or asymptote. param[k] is the Busemann (tau-arclength)
// parameter of chain.points[k].
struct LineSample {
  Chain chain;
  std::vector<double> param;
  double margin = 0.0;   // edge margin delta: params live in (-pi/2 + delta, pi/2 - delta)
  double epsilon = 0.0;  // worst mismatch between tau increments and param increments
  bool settled = true;   // false when built from the Busemann fit alone

  std::size_t size() const { return chain.size(); }
  std::size_t point(std::size_t k) const { return chain.points[k]; }
  // Largest param increment; the grid step of the line.
  double step() const;
};

// The heaviest pair (first in row-major order) joined by its longest chain.
LineSample find_line(const FiniteCausalSpace& X);

LineSample line_from_chain(const FiniteCausalSpace& X, const Chain& c);

double resolve_tol_disc(const LineSample& gamma, const RigidityOptions& opt);

struct BusemannValue {
  // Tail estimates t_k - tau(x, gamma(t_k)) at the extreme related sample, and
  // the past analogue; absent when x has no related sample on that side.
  std::optional<double> plus;
  std::optional<double> minus;
  bool certified = false;      // both tails had two or more samples and were monotone
  double monotone_gap = 0.0;   // worst increase seen along the tails
  std::size_t tail_used = 0;
  // Least-squares realization of x against the line: cos tau_k =
  // sin(t) sin(t_k) + cos(t) cosh(offset) cos(t_k). `limit` is b_+(x).
  double limit = 0.0;
  double offset = 0.0;
  double fit_rms = 0.0;
};

BusemannValue busemann(const FiniteCausalSpace& X, const LineSample& gamma, std::size_t x, double tol);

// Busemann values for every point; empty entries are outside the sampled I(gamma).
std::vector<std::optional<BusemannValue>> busemann_table(const FiniteCausalSpace& X, const LineSample& gamma,
                                                         double tol, int jobs = 1);

LineSample construct_asymptote(const FiniteCausalSpace& X, const LineSample& gamma, std::size_t p,
                               const RigidityOptions& opt = {});

struct CEntry {
  std::size_t s_index = 0, t_index = 0;
  double value = 0.0;
  bool excluded = false;
};

// Null c-function at one parameter: the true infimum lies between the last
// unrelated sample and the first related one, so the value is a bracket.
struct NullEntry {
  std::size_t s_index = 0;
  std::size_t t_index = 0;  // first related sample
  double lo = 0.0, hi = 0.0;
  bool excluded = false;
};

struct ParallelReport {
  std::vector<CEntry> c_ab, c_ba;
  std::vector<NullEntry> null_a, null_b;
  double constant = 0.0;  // median of the retained c_ab and c_ba entries
  double max_deviation = 0.0;
  std::size_t defined = 0;
  std::size_t excluded = 0;
  double tolerance = 0.0;
  bool pass = false;
};

ParallelReport c_functions(const FiniteCausalSpace& X, const LineSample& alpha, const LineSample& beta,
                           double tol);

struct ParallelVerdict {
  bool parallel = false;
  double c = 0.0;
};

ParallelVerdict check_parallel(const FiniteCausalSpace& X, const LineSample& alpha, const LineSample& beta,
                               double tol);

struct SlicePoint {
  std::string label;
  std::vector<std::size_t> members;  // space points grouped onto this asymptote
  std::size_t below = 0, above = 0;  // asymptote positions bracketing b = 0
  double fraction = 0.0;
};

struct Slice {
  FiniteMetricSpace metric;
  std::vector<SlicePoint> points;
  std::vector<LineSample> asymptotes;  // one per slice point
  std::vector<long> group_of;          // slice point of every space point, -1 outside I(gamma)
  ComparisonReport metric_report;
  double tol_disc = 0.0;
  double tol_identity = 0.0;
  std::size_t unsettled = 0;  // points whose asymptote came from the fit alone
};

Slice extract_slice(const FiniteCausalSpace& X, const LineSample& gamma, const RigidityOptions& opt = {});

struct MapSample {
  double s = 0.0;
  std::size_t slice_point = 0;
  std::size_t index = 0;
};

struct SplittingResult {
  Slice slice;
  std::vector<MapSample> samples;
  double residual = 0.0;
  std::size_t residual_i = 0, residual_j = 0;
  std::size_t pairs = 0;
  std::size_t mismatches = 0;
  std::vector<std::pair<std::size_t, std::size_t>> mismatch_list;  // first 64
  double busemann_error = 0.0;  // max |b(f(s,p)) - s|
  double tolerance = 0.0;
  bool pass = false;
};

SplittingResult build_splitting(const FiniteCausalSpace& X, const LineSample& gamma, const RigidityOptions& opt = {});

// Comparison triangles (p, y1, y2) and (p, y2, y3) glued along p-y2 on
// opposite sides; the y's must come out collinear. k1 < k2 < k3 index gamma.
ComparisonReport stacking_audit(const FiniteCausalSpace& X, const LineSample& gamma, std::size_t p,
                                std::size_t k1, std::size_t k2, std::size_t k3, double tol);

// (1+3)-point condition with hyperbolic comparison angles.
ComparisonReport check_slice_alexandrov(const FiniteMetricSpace& S, double tol);

}  // namespace llk
