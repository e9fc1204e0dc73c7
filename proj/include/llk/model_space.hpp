#pragma once

// Two-dimensional anti-de Sitter space with K = -1, in the warped chart
// AdS' = (-pi/2, pi/2) x_cos R and in the ambient quadric b(P,P) = -1 of
// R^{2,1} with signature (-,-,+).

#include <array>
#include <numbers>
#include <utility>

namespace llk {

inline constexpr double kPi = std::numbers::pi;
// Legal-domain slack for arccos/arcosh arguments.
inline constexpr double kSlack = 1e-9;

struct AdsPoint {
  double t = 0.0;
  double x = 0.0;
};

// Also used for tangent vectors at a point of the quadric.
struct AmbientPoint {
  double s1 = 0.0;
  double s2 = 0.0;
  double z = 0.0;
};

inline AmbientPoint operator+(AmbientPoint a, AmbientPoint b) { return {a.s1 + b.s1, a.s2 + b.s2, a.z + b.z}; }
inline AmbientPoint operator-(AmbientPoint a, AmbientPoint b) { return {a.s1 - b.s1, a.s2 - b.s2, a.z - b.z}; }
inline AmbientPoint operator*(double k, AmbientPoint a) { return {k * a.s1, k * a.s2, k * a.z}; }

enum class Relation { timelike, null, unrelated, past_directed };

const char* relation_name(Relation r);

struct IntervalResult {
  Relation relation = Relation::unrelated;
  double tau = 0.0;

  bool causal() const { return relation == Relation::timelike || relation == Relation::null; }
};

// Time separation in the chart. A pair in reverse time order comes back as
// past_directed carrying the forward separation tau(q, p).
IntervalResult ads_interval(AdsPoint p, AdsPoint q);

AmbientPoint embed_ads(AdsPoint p);
// Inverse of embed_ads on the patch s2 > |z|.
AdsPoint chart_point(AmbientPoint P);
double bilinear(AmbientPoint P, AmbientPoint Q);
IntervalResult ambient_tau(AmbientPoint P, AmbientPoint Q);

// Law of cosines: cos a13 = cos a12 cos a23 - sigma sin a12 sin a23 cosh omega.
double loc_side(double a12, double a23, double omega, int sigma);
double loc_angle(double a12, double a23, double a13, int sigma);

struct SignedAngle {
  double omega = 0.0;
  int sigma = 1;
  double value() const { return sigma * omega; }
};

// Angle at x2 of the triangle x1, x2, x3 from the six directed separations.
SignedAngle comparison_angle(double tau12, double tau21, double tau23, double tau32, double tau13,
                             double tau31);

// sigma = +1: x1 << x2 << x3. sigma = -1: x2 is the past endpoint; the longer
// of a12, a23 decides which of x1, x3 comes last.
struct TriangleSides {
  double a12 = 0.0;
  double a23 = 0.0;
  double a13 = 0.0;
  int sigma = 1;
};

enum class SideId { s12, s23, s13 };

// Unit-speed geodesic start + s * tangent, in the ambient picture.
struct SideGeodesic {
  int past = 0;
  int future = 0;
  AmbientPoint start;
  AmbientPoint tangent;
  double length = 0.0;
};

struct TriangleRealization {
  AdsPoint x1, x2, x3;
  std::array<AmbientPoint, 3> ambient;
  std::array<SideGeodesic, 3> sides;  // indexed by SideId
};

TriangleRealization realize_triangle(const TriangleSides& sides);

// Past, middle and future vertex of a timelike triangle with the long side
// vertical and centred on t = 0; the middle vertex sits at x >= 0.
struct OrderedRealization {
  AmbientPoint past, middle, future;
};
OrderedRealization realize_ordered(double a_pm, double a_mf, double a_pf);

AdsPoint comparison_point(const TriangleRealization& tri, SideId side, double s);
AmbientPoint comparison_point_ambient(const TriangleRealization& tri, SideId side, double s);

// Point at tau-arclength s from P towards Q along their geodesic segment.
AmbientPoint segment_point(AmbientPoint P, AmbientPoint Q, double length, double s);
// Unit tangent at P of the segment towards Q (either time order).
AmbientPoint unit_direction(AmbientPoint P, AmbientPoint Q);
// Hyperbolic angle between two unit timelike tangents at the same point.
double hyperbolic_angle(AmbientPoint u, AmbientPoint v);

// Third vertex X with -b(X,A) = cos tau_a and -b(X,B) = cos tau_b, on the
// given side (+1 or -1) of the geodesic through A and B.
AmbientPoint realize_from_anchors(AmbientPoint A, AmbientPoint B, double tau_a, double tau_b,
                                  int side);

struct GeodesicParams {
  double omega = 0.0;
  double c = 0.0;

  std::pair<double, double> domain() const;
};

AdsPoint geodesic_point(const GeodesicParams& g, double lambda);

double conformal_time(double t);
double conformal_time_inv(double s);

double causal_boundary_tau(double t0, double t1);

}  // namespace llk
