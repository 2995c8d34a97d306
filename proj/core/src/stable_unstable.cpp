#include "hyplab/stable_unstable.hpp"

#include <cmath>
#include <cstdio>

namespace hyplab {

std::string KappaPoint::serialize() const {
  std::string out;
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (!out.empty()) out += ' ';
    out += buf;
  };
  put(w);
  put(theta);
  for (int i = 0; i < y.size(); ++i) put(y[i]);
  for (int i = 0; i < eta.size(); ++i) put(eta[i]);
  return out;
}

double energy(const PhasePoint& p) {
  double q = minkowski_inner(p.xi, p.xi);
  return std::sqrt(std::max(q, 0.0));
}

bool on_cosphere(const PhasePoint& p, double tol) {
  return std::abs(minkowski_inner(p.x, p.x) + 1) <= tol && p.x[0] > 0 &&
         std::abs(minkowski_inner(p.x, p.xi)) <= tol && std::abs(minkowski_inner(p.xi, p.xi) - 1) <= tol;
}

bool tangent_valid(const PhasePoint& p, const TangentPair& v, double tol) {
  return std::abs(minkowski_inner(p.x, v.vx)) <= tol &&
         std::abs(minkowski_inner(p.x, v.vxi) + minkowski_inner(p.xi, v.vx)) <= tol &&
         std::abs(minkowski_inner(p.xi, v.vxi)) <= tol;
}

PhasePoint phase_point_from_frame(const Mat& g) { return {g.col(0), g.col(1)}; }

PhasePoint random_phase_point(int n, Rng& rng, double spread) {
  return phase_point_from_frame(random_group_element(n, rng, 2, 0.5 * spread).matrix());
}

Vec hyperboloid_to_ball(const Vec& x) {
  if (classify_point(x, 1e-8 * std::max(1.0, x[0] * x[0])) != PointClass::Hyperboloid)
    throw DomainError("hyperboloid_to_ball: point is not on the hyperboloid");
  return x.tail(x.size() - 1) / (1 + x[0]);
}

Vec ball_to_hyperboloid(const Vec& q) {
  const double s = q.squaredNorm();
  if (!(s < 1)) throw DomainError("ball_to_hyperboloid: point outside the open unit ball");
  Vec x(q.size() + 1);
  x[0] = (1 + s) / (1 - s);
  x.tail(q.size()) = 2 * q / (1 - s);
  return x;
}

Vec boundary_map(const PhasePoint& p, Sign s) {
  const double e = energy(p);
  if (!(e > 0)) throw DomainError("boundary_map: zero covector");
  Vec u = p.x + sign_value(s) * p.xi / e;
  Vec sp = u.tail(u.size() - 1);
  return sp / sp.norm();
}

Vec boundary_map_by_flow(const PhasePoint& p, Sign s, double t_far) {
  auto [x, xi] = geodesic_flow_homogeneous(p.x, p.xi, sign_value(s) * t_far);
  Vec sp = x.tail(x.size() - 1) / (1 + x[0]);
  return sp / sp.norm();
}

std::vector<TangentPair> stable_unstable_basis(const PhasePoint& p, Bundle which) {
  const int n = p.dim();
  const double e = energy(p);
  if (!(e > 0)) throw DomainError("stable_unstable_basis: zero covector");
  Vec u = p.xi / e;
  std::vector<Vec> basis;
  for (int k = 0; k < n + 2 && static_cast<int>(basis.size()) < n; ++k) {
    Vec v = basis_vector(n, k);
    v += minkowski_inner(v, p.x) * p.x;
    v -= minkowski_inner(v, u) * u;
    for (const Vec& b : basis) v -= minkowski_inner(v, b) * b;
    double q = minkowski_inner(v, v);
    if (q < 1e-8) continue;
    basis.push_back(v / std::sqrt(q));
  }
  if (static_cast<int>(basis.size()) != n) throw CertificationError("stable_unstable_basis: rank deficiency");
  const double sg = which == Bundle::Stable ? -1.0 : 1.0;
  std::vector<TangentPair> out;
  for (const Vec& v : basis) out.push_back({v, sg * e * v});
  return out;
}

TangentPair flow_differential(const PhasePoint& p, const TangentPair& v, double t) {
  const double s = energy(p);
  const double ds = minkowski_inner(p.xi, v.vxi) / s;
  Vec u = p.xi / s;
  Vec du = (v.vxi - u * ds) / s;
  const double c = std::cosh(t), sh = std::sinh(t);
  TangentPair out;
  out.vx = v.vx * c + du * sh;
  out.vxi = ds * (p.x * sh + u * c) + s * (v.vx * sh + du * c);
  return out;
}

TangentPair flow_direction(const PhasePoint& p) {
  const double s = energy(p);
  return {p.xi / s, s * p.x};
}

double tangent_norm_g(const TangentPair& v) { return std::sqrt(std::max(minkowski_inner(v.vx, v.vx), 0.0)); }

double expansion_rate(const PhasePoint& p, const TangentPair& v, double t, double tol) {
  const double e = energy(p);
  const double nv = tangent_norm_g(v);
  if (!(nv > 0)) throw DomainError("expansion_rate: zero base component");
  Vec u = p.xi / e;
  double perp = std::max(std::abs(minkowski_inner(v.vx, p.x)), std::abs(minkowski_inner(v.vx, u))) / nv;
  double unst = (v.vxi - e * v.vx).cwiseAbs().maxCoeff() / (e * nv);
  double stab = (v.vxi + e * v.vx).cwiseAbs().maxCoeff() / (e * nv);
  if (perp > tol || std::min(unst, stab) > tol)
    throw DomainError("expansion_rate: vector lies in neither E_u nor E_s");
  return tangent_norm_g(flow_differential(p, v, t)) / nv;
}

double poisson_kernel(const Vec& x, const Vec& y) {
  const double r2 = x.squaredNorm();
  if (!(r2 < 1)) throw DomainError("poisson_kernel: point outside the open unit ball");
  return (1 - r2) / (x - y).squaredNorm();
}

Vec half_stereographic(const Vec& y, const Vec& yp) {
  const double d = y.dot(yp);
  if (std::abs(1 - d) < 1e-14) throw DomainError("half_stereographic: y and y' coincide");
  return (yp - d * y) / (1 - d);
}

KappaPoint kappa(const PhasePoint& p, Sign s) {
  const double w = energy(p);
  Vec b_minus = boundary_map(p, opposite(s));  // B_{-+}
  Vec b_plus = boundary_map(p, s);             // B_{+-}
  if ((b_minus - b_plus).norm() < 1e-12) throw DomainError("kappa: degenerate endpoints");
  KappaPoint k;
  k.w = w;
  k.y = b_minus;
  k.theta = sign_value(s) * std::log(poisson_kernel(hyperboloid_to_ball(p.x), b_minus));
  k.eta = sign_value(s) * w * half_stereographic(b_minus, b_plus);
  return k;
}

static Mat ball_jacobian(const Vec& q) {
  const int m = static_cast<int>(q.size());
  const double s = q.squaredNorm();
  const double a = 1 - s;
  Mat D(m + 1, m);
  for (int i = 0; i < m; ++i) {
    D(0, i) = 4 * q[i] / (a * a);
    for (int j = 0; j < m; ++j) D(1 + j, i) = (i == j ? 2 / a : 0.0) + 4 * q[i] * q[j] / (a * a);
  }
  return D;
}

PhasePoint from_ball_chart(const Vec& q, const Vec& zeta) {
  const double a = 1 - q.squaredNorm();
  return {ball_to_hyperboloid(q), ball_jacobian(q) * (a * a / 4.0 * zeta)};
}

void to_ball_chart(const PhasePoint& p, Vec& q, Vec& zeta) {
  q = hyperboloid_to_ball(p.x);
  const double a = 1 - q.squaredNorm();
  Vec u = ball_jacobian(q).colPivHouseholderQr().solve(p.xi);
  zeta = 4.0 / (a * a) * u;
}

Mat canonical_form(int m) {
  Mat o = Mat::Zero(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    o(m + i, i) = 1;
    o(i, m + i) = -1;
  }
  return o;
}

double symplectic_residual(const std::function<Vec(const Vec&)>& F, const Vec& z, const Mat& omega_src,
                           const Mat& omega_tgt, double step) {
  const int dim = static_cast<int>(z.size());
  Vec f0 = F(z);
  Mat J(f0.size(), dim);
  for (int i = 0; i < dim; ++i) {
    Vec zp = z, zm = z;
    zp[i] += step;
    zm[i] -= step;
    J.col(i) = (F(zp) - F(zm)) / (2 * step);
  }
  return (J.transpose() * omega_tgt * J - omega_src).cwiseAbs().maxCoeff();
}

static Vec kappa_vector(const KappaPoint& k) {
  const int m = static_cast<int>(k.y.size());
  Vec out(2 * m + 2);
  out[0] = k.w;
  out.segment(1, m) = k.y;
  out[m + 1] = k.theta;
  out.segment(m + 2, m) = k.eta;
  return out;
}

double symplectic_exactness_check(Sign s, const PhasePoint& p, double fd_step) {
  if (fd_step < 1e-6 || fd_step > 1e-3) throw DomainError("symplectic check: fd_step outside [1e-6, 1e-3]");
  const int m = p.dim() + 1;
  Vec q, zeta;
  to_ball_chart(p, q, zeta);
  if (q.norm() > 0.95) throw DomainError("symplectic check: point too close to the chart boundary");
  Vec z(2 * m);
  z << q, zeta;
  auto F = [&](const Vec& zz) {
    return kappa_vector(kappa(from_ball_chart(zz.head(m), zz.tail(m)), s));
  };
  Mat ot = Mat::Zero(2 * m + 2, 2 * m + 2);
  ot(m + 1, 0) = 1;
  ot(0, m + 1) = -1;
  for (int i = 0; i < m; ++i) {
    ot(m + 2 + i, 1 + i) = 1;
    ot(1 + i, m + 2 + i) = -1;
  }
  return symplectic_residual(F, z, canonical_form(m), ot, fd_step);
}

std::vector<TangentPair> weak_foliation_basis(const PhasePoint& p, Sign s) {
  auto out = stable_unstable_basis(p, s == Sign::Plus ? Bundle::Unstable : Bundle::Stable);
  out.push_back(flow_direction(p));
  return out;
}

PhasePoint retract(const PhasePoint& p) {
  double q = -minkowski_inner(p.x, p.x);
  if (!(q > 0) || p.x[0] <= 0) throw DomainError("retract: point left the future cone");
  Vec x = p.x / std::sqrt(q);
  Vec xi = p.xi + minkowski_inner(p.xi, x) * x;
  return {x, xi};
}

double foliation_straightening_residual(Sign s, const PhasePoint& p, const std::vector<TangentPair>& dirs,
                                        double h) {
  double worst = 0;
  for (const TangentPair& v : dirs) {
    KappaPoint kp = kappa(retract({p.x + h * v.vx, p.xi + h * v.vxi}), s);
    KappaPoint km = kappa(retract({p.x - h * v.vx, p.xi - h * v.vxi}), s);
    Vec d = (kappa_vector(kp) - kappa_vector(km)) / (2 * h);
    const int m = static_cast<int>(kp.y.size());
    double num = std::abs(d[0]) + d.segment(1, m).norm();
    double den = d.norm();
    if (!(den > 0)) throw CertificationError("foliation check: vanishing derivative");
    worst = std::max(worst, num / den);
  }
  return worst;
}

double foliation_straightening_check(Sign s, const PhasePoint& p, double h) {
  return foliation_straightening_residual(s, p, weak_foliation_basis(p, s), h);
}

double tangent_decomposition_margin(const PhasePoint& p) {
  const int n = p.dim();
  std::vector<TangentPair> cols;
  cols.push_back(flow_direction(p));
  cols.push_back({Vec::Zero(n + 2), p.xi});
  for (auto& v : stable_unstable_basis(p, Bundle::Stable)) cols.push_back(v);
  for (auto& v : stable_unstable_basis(p, Bundle::Unstable)) cols.push_back(v);
  Mat M(2 * (n + 2), cols.size());
  for (size_t c = 0; c < cols.size(); ++c) {
    Vec col(2 * (n + 2));
    col << cols[c].vx, cols[c].vxi;
    M.col(c) = col / col.norm();
  }
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues().minCoeff();
}

}  // namespace hyplab
