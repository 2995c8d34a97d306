#pragma once

// Gnomonic charts on S^n, chart-level porosity and the log-phase mixed Hessian.

#include "hyplab/common.hpp"
#include "hyplab/porosity.hpp"

#include <functional>
#include <vector>

namespace hyplab {

struct GnomonicChart {
  Vec center;  // unit vector in R^{n+1}
  Mat frame;   // (n+1) x n orthonormal basis of the tangent hyperplane
  double radius = 0.5;
};

struct ChartAtlas {
  int n = 1;
  double radius = 0.5;
  std::vector<GnomonicChart> charts;
};

double sphere_angle(const Vec& a, const Vec& b);

GnomonicChart make_chart(const Vec& center, double radius = 0.5);
// S^1: ceil(pi/radius) + 1 (at least seven) equally spaced centers; S^2: smallest Fibonacci set passing the coverage scan.
ChartAtlas gnomonic_atlas(int n, double radius = 0.5);
// Largest angle from a dense sample of the sphere to the nearest chart center.
double atlas_covering_angle(const ChartAtlas& atlas, int samples = 20000);

Vec gnomonic_project(const GnomonicChart& c, const Vec& y);  // throws outside the chart
Vec gnomonic_project_unchecked(const GnomonicChart& c, const Vec& y);
Vec gnomonic_unproject(const GnomonicChart& c, const Vec& x);

// Lower bi-Lipschitz constant of the inverse chart on a cap of the given radius:
// |x - y| <= C2 |psi^{-1}(x) - psi^{-1}(y)| (chordal), and psi^{-1} is 1-Lipschitz.
double chart_C2(double radius);

struct ChartLipschitz {
  double C2 = 0;       // max |x - y| / |psi^{-1}(x) - psi^{-1}(y)|
  double upper = 0;    // max |psi^{-1}(x) - psi^{-1}(y)| / |x - y|
  int pairs = 0;
};
// Random pairs of points of the chart image of the cap.
ChartLipschitz measure_chart_lipschitz(const GnomonicChart& c, int pairs, Rng& rng);

// Largest distance of projected great-circle points from the line through the projected endpoints.
double great_circle_collinearity(const GnomonicChart& c, const Vec& a, const Vec& b, int samples = 64);

// Union of closed geodesic caps on S^n.
struct CapUnion {
  int n = 1;
  bool full = false;
  std::vector<Vec> centers;
  std::vector<double> radii;
  // Geodesic distance to the set (0 inside).
  double distance(const Vec& y) const;
  // distance(y) <= rho, without inverse cosines.
  bool within(const Vec& y, double rho) const;
  bool empty_set() const { return !full && centers.empty(); }
};

// Depth-k Cantor set of an arc of S^1 starting at angle offset, as a union of closed arcs.
CapUnion cantor_arc_set(const CantorSpec& spec, int depth, double offset, double length);
// Cantor set along the equator of S^2 (longitudes in [offset, offset + length]) thickened by halfwidth.
CapUnion cantor_band_set(const CantorSpec& spec, int depth, double offset, double length, double halfwidth);

// Rasterization of psi(Omega cap M) on [0,1]^n, where the chart image square [-T, T]^n,
// T = tan(radius), is mapped affinely onto the unit cube.  Superset by construction.
BoxSet chart_raster(const CapUnion& omega, const GnomonicChart& chart, int m);
double chart_plane_halfwidth(const GnomonicChart& chart);

struct SpherePorosityReport {
  std::vector<PorosityReport> charts;  // one per chart that meets the set
  std::vector<int> chart_ids;
  Verdict verdict = Verdict::Inconclusive;
};

// Runs the Euclidean checker on every chart image.  Scales are in chart-plane units.
SpherePorosityReport sphere_porosity_check(const CapUnion& omega, const ChartAtlas& atlas, PorosityKind kind,
                                           double nu, double alpha0, double alpha1, int m, int directions = 8);

struct MappedPorosityCheck {
  bool hypothesis = false;  // angle-space porosity certified
  double C2 = 0;
  double nu_chart = 0;
  SpherePorosityReport charts;
  bool holds = false;       // every chart image certified at nu_chart
};

// S^1: certifies the arc Cantor set in the angle coordinate at nu, then checks every chart
// image at nu / (2 C2) less the rasterization slack, over the same scales.
MappedPorosityCheck verify_mapped_porosity_s1(const CantorSpec& spec, int depth, double offset, double length,
                                              double nu, double alpha0, double alpha1, int m_chart);

// ---- mixed Hessian of the log phase ----

using ScalarPhase = std::function<double(const Vec&, const Vec&)>;

// 2 w log|y - y'| - w log 4.
double log_phase(double w, const Vec& y, const Vec& yp);
ScalarPhase log_phase_fn(double w);

// Central differences in ambient coordinates; step 0 picks 2e-4 |y - y'|.
Mat mixed_hessian_fd(const ScalarPhase& phi, const Vec& y, const Vec& yp, double fd_step = 0);
double mixed_hessian_det(const ScalarPhase& phi, const Vec& y, const Vec& yp, double fd_step = 0);

// 4 w |d|^{-4} (d d^T - |d|^2/2 I), d = y - y'.
Mat log_phase_mixed_hessian(double w, const Vec& y, const Vec& yp);
// (4 w |d|^{-4})^{n+1} det(d d^T - |d|^2/2 I), determinant evaluated directly.
double log_phase_symbolic_det(double w, const Vec& y, const Vec& yp);
// Relative gap between det(v v^T + B) and (1 + v^T B^{-1} v) det B.
double determinant_lemma_residual(const Vec& v, const Mat& B);

}  // namespace hyplab
