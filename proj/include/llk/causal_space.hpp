#pragma once

// Finite Lorentzian pre-length spaces: a tau matrix and a causal relation over
// a labelled point set, with chain realizers and curvature audits.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "llk/model_space.hpp"

namespace llk {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
// Side-length cap for comparison triangles.
inline constexpr double kSizeBound = kPi - 1e-6;

struct FiniteCausalSpace {
  std::vector<std::string> labels;
  std::vector<double> tau;         // row-major n x n, +inf allowed
  std::vector<std::uint8_t> leq;   // row-major n x n
  std::vector<std::vector<double>> coords;  // optional; coords[i][0] is a time

  std::size_t size() const { return labels.size(); }
  double t(std::size_t i, std::size_t j) const { return tau[i * size() + j]; }
  bool le(std::size_t i, std::size_t j) const { return leq[i * size() + j] != 0; }
  bool ll(std::size_t i, std::size_t j) const { return t(i, j) > 0.0; }
  // Signed separation: tau(i,j) - tau(j,i).
  double sep(std::size_t i, std::size_t j) const { return t(i, j) - t(j, i); }

  static FiniteCausalSpace sized(std::size_t n);
};

// Throws a structural error when matrix shapes disagree with the labels.
void check_shape(const FiniteCausalSpace& X);

struct Chain {
  std::vector<std::size_t> points;
  std::vector<double> params;  // cumulative tau, params[0] = 0

  std::size_t size() const { return points.size(); }
  double value() const { return params.empty() ? 0.0 : params.back(); }
  std::size_t front() const { return points.front(); }
  std::size_t back() const { return points.back(); }
};

Chain make_chain(const FiniteCausalSpace& X, std::vector<std::size_t> points);
Chain reversed(const FiniteCausalSpace& X, const Chain& c);

struct Violation {
  std::size_t i = 0;
  std::size_t j = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double deficit = 0.0;
  std::string kind;
};

struct ComparisonReport {
  std::string check;
  double tolerance = 0.0;
  std::size_t checked = 0;
  std::size_t violation_count = 0;
  std::vector<Violation> violations;  // the first `max_listed`, in check order
  std::size_t max_listed = 64;
  double max_deficit = 0.0;
  double max_excess = 0.0;  // reversed inequality, for upper-bound audits
  std::size_t excess_count = 0;
  bool pass = true;
  std::vector<std::pair<std::string, double>> notes;

  void record(const Violation& v);
  void note(std::string key, double value) { notes.emplace_back(std::move(key), value); }
  double note_value(const std::string& key, double fallback = 0.0) const;
  // Appends another report's tallies; used to merge per-item reports in order.
  void absorb(const ComparisonReport& other);
  void finish() { pass = violation_count == 0; }
};

ComparisonReport validate_space(const FiniteCausalSpace& X, double tol = 1e-9, int jobs = 1);

// Heaviest chain from i to j; near-ties (within 1e-12) go to the
// lexicographically smallest index sequence.
Chain longest_chain(const FiniteCausalSpace& X, std::size_t i, std::size_t j);

// Vertices sorted causally: past << middle << future. Sides run forward.
struct Triangle {
  std::size_t past = 0, middle = 0, future = 0;
  Chain pm, mf, pf;

  double loss(const FiniteCausalSpace& X) const;
};

Triangle make_triangle(const FiniteCausalSpace& X, std::size_t a, std::size_t b, std::size_t c);

// Default chain-loss budget: twice the largest gap between consecutive
// distinct sample times, or +inf when the space carries no coordinates.
double chain_budget(const FiniteCausalSpace& X);

// Lower-bound audit of tau against the comparison triangle. Side chains losing
// more than `epsilon` against tau raise a stale-chain error; the loss that is
// accepted widens the effective tolerance.
ComparisonReport check_triangle_comparison(const FiniteCausalSpace& X, const Triangle& tri, double tol,
                                           double epsilon = kInf);

ComparisonReport check_monotonicity(const FiniteCausalSpace& X, std::size_t vertex, const Chain& alpha,
                                    const Chain& beta, double tol);

struct AngleEstimate {
  double value = 0.0;
  double spread = 0.0;
  std::size_t s_index = 0, t_index = 0;
};

AngleEstimate upper_angle_estimate(const FiniteCausalSpace& X, std::size_t vertex, const Chain& alpha,
                                   const Chain& beta);

enum class SubdivisionKind { across, future };

ComparisonReport check_subdivision(const FiniteCausalSpace& X, const Triangle& tri, std::size_t p,
                                   SubdivisionKind which, double tol);

ComparisonReport myers_check(const FiniteCausalSpace& X, double tol = 1e-9);

// Triangles with at least one side carrying an interior chain point, drawn
// from a per-item stream so results do not depend on the worker count.
struct TriangleSample {
  bool found = false;
  Triangle triangle;
  std::size_t long_side_point = 0;  // an interior point on a multi-point side
  int long_side = 0;                // 0 = pm, 1 = mf, 2 = pf
};

TriangleSample sample_triangle(const FiniteCausalSpace& X, std::uint64_t seed, std::uint64_t item,
                               int attempts = 64);

// Per-item stream keyed by (seed, item); engine and seeding are fully
// specified by the standard, so draws match across platforms and job counts.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t item) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(item), static_cast<std::uint32_t>(item >> 32)};
    engine_.seed(seq);
  }
  std::uint64_t next() { return engine_(); }
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(engine_() % n); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace llk
