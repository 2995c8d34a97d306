#include "hyplab/sphere.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyplab {

double sphere_angle(const Vec& a, const Vec& b) {
  // Stays accurate for nearly equal or antipodal unit vectors.
  return 2 * std::atan2((a - b).norm(), (a + b).norm());
}

GnomonicChart make_chart(const Vec& center, double radius) {
  if (center.size() < 2) throw DomainError("make_chart: need a point of S^n, n >= 1");
  if (!(radius > 0 && radius < M_PI / 2)) throw DomainError("make_chart: radius must lie in (0, pi/2)");
  GnomonicChart c;
  c.center = center.normalized();
  c.radius = radius;
  const int d = static_cast<int>(center.size());
  Eigen::HouseholderQR<Mat> qr(Mat(c.center));
  Mat q = qr.householderQ() * Mat::Identity(d, d);
  c.frame = q.rightCols(d - 1);
  return c;
}

namespace {

std::vector<Vec> fibonacci_s2(int count) {
  std::vector<Vec> pts;
  const double golden = M_PI * (3 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1 - (2.0 * k + 1) / count;
    const double r = std::sqrt(std::max(0.0, 1 - z * z));
    Vec p(3);
    p << r * std::cos(golden * k), r * std::sin(golden * k), z;
    pts.push_back(p);
  }
  return pts;
}

std::vector<Vec> sample_sphere(int n, int samples) {
  if (n == 2) return fibonacci_s2(samples);
  std::vector<Vec> pts;
  for (int j = 0; j < samples; ++j) {
    Vec p(2);
    p << std::cos(2 * M_PI * j / samples), std::sin(2 * M_PI * j / samples);
    pts.push_back(p);
  }
  return pts;
}

double sample_spacing(int n, int samples) {
  return n == 1 ? M_PI / samples : std::sqrt(4 * M_PI / samples);
}

}  // namespace

double atlas_covering_angle(const ChartAtlas& atlas, int samples) {
  if (atlas.charts.empty()) return M_PI;
  double worst = 0;
  for (const Vec& p : sample_sphere(atlas.n, samples)) {
    double best = M_PI;
    for (const auto& c : atlas.charts) best = std::min(best, sphere_angle(p, c.center));
    worst = std::max(worst, best);
  }
  return worst;
}

ChartAtlas gnomonic_atlas(int n, double radius) {
  if (n != 1 && n != 2) throw DomainError("gnomonic_atlas: only S^1 and S^2 are supported");
  ChartAtlas atlas;
  atlas.n = n;
  atlas.radius = radius;
  if (n == 1) {
    const int k = std::max(7, static_cast<int>(std::ceil(M_PI / radius)) + 1);
    for (int j = 0; j < k; ++j) {
      Vec c(2);
      c << std::cos(2 * M_PI * j / k), std::sin(2 * M_PI * j / k);
      atlas.charts.push_back(make_chart(c, radius));
    }
    if (M_PI / k >= radius) throw DomainError("chart coverage gap");
    return atlas;
  }
  const int samples = 20000;
  const double need = radius - sample_spacing(2, samples);
  for (int k = 30; k <= 2000; k += 2) {
    atlas.charts.clear();
    for (const Vec& c : fibonacci_s2(k)) atlas.charts.push_back(make_chart(c, radius));
    if (atlas_covering_angle(atlas, samples) < need) return atlas;
  }
  throw DomainError("chart coverage gap");
}

Vec gnomonic_project_unchecked(const GnomonicChart& c, const Vec& y) {
  const double t = y.dot(c.center);
  if (!(t > 0)) throw DomainError("gnomonic_project: point on or behind the tangent hyperplane horizon");
  return c.frame.transpose() * (y / t);
}

Vec gnomonic_project(const GnomonicChart& c, const Vec& y) {
  if (y.size() != c.center.size()) throw DomainError("gnomonic_project: dimension mismatch");
  if (std::abs(y.norm() - 1) > 1e-9) throw DomainError("gnomonic_project: point not on the sphere");
  if (sphere_angle(y, c.center) > c.radius + 1e-12) throw DomainError("gnomonic_project: point outside the chart");
  return gnomonic_project_unchecked(c, y);
}

Vec gnomonic_unproject(const GnomonicChart& c, const Vec& x) {
  if (x.size() != c.frame.cols()) throw DomainError("gnomonic_unproject: dimension mismatch");
  Vec p = c.center + c.frame * x;
  return p / p.norm();
}

double chart_C2(double radius) {
  if (!(radius > 0 && radius < M_PI / 2)) throw DomainError("chart_C2: radius must lie in (0, pi/2)");
  const double cr = std::cos(radius);
  return radius / std::sin(radius) / (cr * cr);
}

ChartLipschitz measure_chart_lipschitz(const GnomonicChart& c, int pairs, Rng& rng) {
  const int n = static_cast<int>(c.frame.cols());
  const double T = std::tan(c.radius);
  auto draw = [&]() {
    Vec d = random_normal(rng, n);
    d.normalize();
    return Vec(d * T * std::pow(uniform(rng, 0, 1), 1.0 / n));
  };
  ChartLipschitz out;
  while (out.pairs < pairs) {
    const Vec x = draw(), y = draw();
    const double dx = (x - y).norm();
    if (dx < 1e-9) continue;
    const double ds = (gnomonic_unproject(c, x) - gnomonic_unproject(c, y)).norm();
    out.C2 = std::max(out.C2, dx / ds);
    out.upper = std::max(out.upper, ds / dx);
    ++out.pairs;
  }
  return out;
}

double great_circle_collinearity(const GnomonicChart& c, const Vec& a, const Vec& b, int samples) {
  if (samples < 2) throw DomainError("great_circle_collinearity: need at least two samples");
  const double th = sphere_angle(a, b);
  if (!(th > 1e-12) || th > M_PI - 1e-9) throw DomainError("great_circle_collinearity: endpoints must span a unique arc");
  std::vector<Vec> pts;
  for (int i = 0; i < samples; ++i) {
    const double t = double(i) / (samples - 1);
    const Vec p = (std::sin((1 - t) * th) * a + std::sin(t * th) * b) / std::sin(th);
    pts.push_back(gnomonic_project(c, p.normalized()));
  }
  const Vec p0 = pts.front();
  const Vec dir = (pts.back() - p0).normalized();
  double worst = 0;
  for (const Vec& p : pts) {
    const Vec r = p - p0;
    worst = std::max(worst, (r - r.dot(dir) * dir).norm());
  }
  return worst;
}

double CapUnion::distance(const Vec& y) const {
  if (full) return 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers.size(); ++i) best = std::min(best, sphere_angle(y, centers[i]) - radii[i]);
  return std::max(best, 0.0);
}

bool CapUnion::within(const Vec& y, double rho) const {
  if (full) return true;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double r = radii[i] + rho;
    if (r >= M_PI || y.dot(centers[i]) >= std::cos(r)) return true;
  }
  return false;
}

namespace {

// Kept intervals [a, a + width] of the depth-k Cantor set in [0,1].
std::vector<double> cantor_starts(const CantorSpec& spec, int depth, double& width) {
  spec.validate(1);
  if (depth < 0) throw DomainError("cantor: depth must be nonnegative");
  std::vector<double> starts{0.0};
  width = 1;
  for (int k = 0; k < depth; ++k) {
    width /= spec.base;
    std::vector<double> next;
    for (double a : starts)
      for (int d : spec.axis_digits(0)) next.push_back(a + d * width);
    starts = std::move(next);
  }
  return starts;
}

Vec circle_point(double t) {
  Vec p(2);
  p << std::cos(t), std::sin(t);
  return p;
}

}  // namespace

CapUnion cantor_arc_set(const CantorSpec& spec, int depth, double offset, double length) {
  if (!(length > 0 && length < M_PI)) throw DomainError("cantor_arc_set: arc length must lie in (0, pi)");
  double width = 0;
  CapUnion u;
  u.n = 1;
  for (double a : cantor_starts(spec, depth, width)) {
    u.centers.push_back(circle_point(offset + length * (a + width / 2)));
    u.radii.push_back(length * width / 2);
  }
  return u;
}

CapUnion cantor_band_set(const CantorSpec& spec, int depth, double offset, double length, double halfwidth) {
  if (!(length > 0 && length < M_PI)) throw DomainError("cantor_band_set: arc length must lie in (0, pi)");
  if (!(halfwidth > 0)) throw DomainError("cantor_band_set: halfwidth must be positive");
  double width = 0;
  CapUnion u;
  u.n = 2;
  const double step = halfwidth / 2;
  for (double a : cantor_starts(spec, depth, width)) {
    const double lo = offset + length * a, hi = lo + length * width;
    const int k = std::max(1, static_cast<int>(std::ceil((hi - lo) / step)));
    for (int i = 0; i <= k; ++i) {
      const double t = lo + (hi - lo) * i / k;
      Vec p(3);
      p << std::cos(t), std::sin(t), 0;
      u.centers.push_back(p);
      u.radii.push_back(halfwidth);
    }
  }
  return u;
}

double chart_plane_halfwidth(const GnomonicChart& chart) { return std::tan(chart.radius); }

BoxSet chart_raster(const CapUnion& omega, const GnomonicChart& chart, int m) {
  const int n = static_cast<int>(chart.frame.cols());
  if (omega.n != n) throw DomainError("chart_raster: set and chart live on different spheres");
  if (m < 1) throw DomainError("chart_raster: need m >= 1");
  const double T = chart_plane_halfwidth(chart);
  const double cell = 2 * T / m;
  // The inverse chart is 1-Lipschitz into the geodesic metric, so every preimage of
  // a cell lies within this angle of the preimage of its center.
  const double rho = cell * std::sqrt(double(n)) / 2;
  BoxSet x = BoxSet::make_empty(n, m);
  const double cos_reach = std::cos(chart.radius + rho);
  for (std::size_t i = 0; i < x.cell_count(); ++i) {
    const Vec u = x.cell_center(i);
    const Vec y = gnomonic_unproject(chart, Vec(Vec::Constant(n, -T) + 2 * T * u));
    if (y.dot(chart.center) < cos_reach) continue;
    if (omega.within(y, rho)) x.mask[i] = 1;
  }
  return x;
}

SpherePorosityReport sphere_porosity_check(const CapUnion& omega, const ChartAtlas& atlas, PorosityKind kind,
                                           double nu, double alpha0, double alpha1, int m, int directions) {
  if (omega.n != atlas.n) throw DomainError("sphere_porosity_check: set and atlas live on different spheres");
  if (atlas.charts.empty() || atlas_covering_angle(atlas, 4000) >= atlas.radius) throw DomainError("chart coverage gap");
  SpherePorosityReport out;
  bool all_certified = true, any_ce = false;
  for (std::size_t k = 0; k < atlas.charts.size(); ++k) {
    const auto& c = atlas.charts[k];
    const double T = chart_plane_halfwidth(c);
    const double rho = 2 * T / m * std::sqrt(double(atlas.n)) / 2;
    if (!omega.within(c.center, c.radius + rho)) continue;
    BoxSet x = chart_raster(omega, c, m);
    if (x.empty_set()) continue;
    const double s = 1 / (2 * T);
    PorosityReport r = kind == PorosityKind::Ball ? ball_porosity_check(x, nu, alpha0 * s, alpha1 * s)
                                                  : line_porosity_check(x, nu, alpha0 * s, alpha1 * s, directions);
    all_certified = all_certified && r.verdict == Verdict::CertifiedPorous;
    any_ce = any_ce || r.verdict == Verdict::CounterexampleFound;
    out.charts.push_back(std::move(r));
    out.chart_ids.push_back(static_cast<int>(k));
  }
  out.verdict = any_ce ? Verdict::CounterexampleFound : all_certified ? Verdict::CertifiedPorous : Verdict::Inconclusive;
  return out;
}

MappedPorosityCheck verify_mapped_porosity_s1(const CantorSpec& spec, int depth, double offset, double length,
                                              double nu, double alpha0, double alpha1, int m_chart) {
  MappedPorosityCheck out;
  const ChartAtlas atlas = gnomonic_atlas(1);
  out.C2 = chart_C2(atlas.radius);
  // Angle coordinate: the arc [offset, offset + length] is the unit interval scaled by length.
  CantorSpec s = spec;
  s.depth = depth;
  BoxSet angle = cantor_generate(s, 1);
  const long need = static_cast<long>(std::ceil(8.0 * length / (nu * alpha0)));
  const int factor = static_cast<int>(std::max(1L, (need + angle.m - 1) / angle.m));
  if (static_cast<long>(angle.m) * factor > (1L << 22)) throw DomainError("verify_mapped_porosity_s1: angle grid too fine");
  if (factor > 1) angle = refine(angle, factor);
  out.hypothesis =
      ball_porosity_check(angle, nu, alpha0 / length, alpha1 / length).verdict == Verdict::CertifiedPorous;
  if (!out.hypothesis) return out;

  const double T = std::tan(atlas.radius);
  const double cell = 2 * T / m_chart;
  // Raster superset loss: the center offset rho pushed forward by sec^2 of the enlarged
  // cap, one half cell, and the checker completeness slack.
  const double rho = cell / 2;
  const double sec2 = 1 / std::pow(std::cos(atlas.radius + rho), 2);
  const double loss_cells = sec2 / 2 + 0.5 + ball_completeness_cells(1);
  out.nu_chart = nu / (2 * out.C2) - loss_cells * cell / alpha0;
  if (!(out.nu_chart > 0)) throw DomainError("resolution inadequate");
  const CapUnion omega = cantor_arc_set(spec, depth, offset, length);
  out.charts = sphere_porosity_check(omega, atlas, PorosityKind::Ball, out.nu_chart, alpha0, alpha1, m_chart);
  out.holds = out.charts.verdict == Verdict::CertifiedPorous;
  return out;
}

// ---- mixed Hessian ----

double log_phase(double w, const Vec& y, const Vec& yp) {
  const double d = (y - yp).norm();
  if (!(d > 0)) throw DomainError("log_phase: y = y'");
  return 2 * w * std::log(d) - w * std::log(4.0);
}

ScalarPhase log_phase_fn(double w) {
  return [w](const Vec& y, const Vec& yp) { return log_phase(w, y, yp); };
}

Mat mixed_hessian_fd(const ScalarPhase& phi, const Vec& y, const Vec& yp, double fd_step) {
  if (y.size() != yp.size()) throw DomainError("mixed_hessian: dimension mismatch");
  const double d = (y - yp).norm();
  if (!(d > 1e-12)) throw DomainError("mixed_hessian: y = y'");
  const double s = fd_step > 0 ? fd_step : 2e-4 * d;
  const int k = static_cast<int>(y.size());
  Mat h(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      Vec yA = y, yB = y, pA = yp, pB = yp;
      yA[a] += s;
      yB[a] -= s;
      pA[b] += s;
      pB[b] -= s;
      h(a, b) = (phi(yA, pA) - phi(yA, pB) - phi(yB, pA) + phi(yB, pB)) / (4 * s * s);
    }
  return h;
}

double mixed_hessian_det(const ScalarPhase& phi, const Vec& y, const Vec& yp, double fd_step) {
  return mixed_hessian_fd(phi, y, yp, fd_step).determinant();
}

Mat log_phase_mixed_hessian(double w, const Vec& y, const Vec& yp) {
  const Vec d = y - yp;
  const double d2 = d.squaredNorm();
  if (!(d2 > 0)) throw DomainError("log_phase_mixed_hessian: y = y'");
  const int k = static_cast<int>(d.size());
  return 4 * w / (d2 * d2) * (d * d.transpose() - 0.5 * d2 * Mat::Identity(k, k));
}

double log_phase_symbolic_det(double w, const Vec& y, const Vec& yp) {
  const Vec d = y - yp;
  const double d2 = d.squaredNorm();
  if (!(d2 > 0)) throw DomainError("log_phase_symbolic_det: y = y'");
  const int k = static_cast<int>(d.size());
  const Mat a = d * d.transpose() - 0.5 * d2 * Mat::Identity(k, k);
  return std::pow(4 * w / (d2 * d2), k) * a.determinant();
}

double determinant_lemma_residual(const Vec& v, const Mat& B) {
  if (B.rows() != v.size() || B.cols() != v.size()) throw DomainError("determinant_lemma_residual: shape mismatch");
  Eigen::FullPivLU<Mat> lu(B);
  if (!lu.isInvertible()) throw DomainError("determinant_lemma_residual: B is singular");
  const double direct = (v * v.transpose() + B).determinant();
  const double lemma = (1 + v.dot(lu.solve(v))) * B.determinant();
  return std::abs(direct - lemma) / std::max(std::abs(direct), std::abs(lemma));
}

}  // namespace hyplab
