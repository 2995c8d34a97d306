#include "hyplab/lorentz.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hyplab {

void check_dimension(int n) {
  if (n < 1 || n > 16) throw DomainError("dimension n must lie in 1..16, got " + std::to_string(n));
}

Mat minkowski_J(int n) {
  Mat J = Mat::Identity(n + 2, n + 2);
  J(0, 0) = -1.0;
  return J;
}

double minkowski_inner(const Vec& u, const Vec& v) {
  if (u.size() != v.size()) throw DomainError("minkowski_inner: dimension mismatch");
  if (u.size() < 3) throw DomainError("minkowski_inner: need at least 3 coordinates");
  return -u[0] * v[0] + u.tail(u.size() - 1).dot(v.tail(v.size() - 1));
}

LorentzVector basis_vector(int n, int k) {
  Vec e = Vec::Zero(n + 2);
  e[k] = 1.0;
  return e;
}

PointClass classify_point(const Vec& v, double tol) {
  double q = minkowski_inner(v, v);
  if (std::abs(q + 1.0) <= tol && v[0] > 0) return PointClass::Hyperboloid;
  if (std::abs(q) <= tol && std::abs(v[0] - 1.0) <= tol) return PointClass::Boundary;
  return PointClass::Neither;
}

const char* point_class_name(PointClass c) {
  switch (c) {
    case PointClass::Hyperboloid: return "Hyperboloid";
    case PointClass::Boundary: return "Boundary";
    default: return "Neither";
  }
}

double group_defect(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() < 3) return INFINITY;
  const int n = lorentz_dim(m);
  Mat J = minkowski_J(n);
  double d1 = (m.transpose() * J * m - J).cwiseAbs().maxCoeff();
  double d2 = std::abs(m.determinant() - 1.0);
  double d = std::max(d1, d2);
  if (!(m(0, 0) > 0)) d = std::max(d, 1.0 + std::abs(m(0, 0)));
  return d;
}

bool is_group_element(const Mat& m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 3) return false;
  if (!m.allFinite()) return false;
  return group_defect(m) <= tol;
}

GroupElement GroupElement::certify(const Mat& m, double tol) {
  if (!is_group_element(m, tol))
    throw CertificationError("matrix is not in SO_0(1,n+1) within tolerance (defect " +
                             std::to_string(group_defect(m)) + ")");
  return trusted(m);
}

GroupElement GroupElement::identity(int n) {
  check_dimension(n);
  return trusted(Mat::Identity(n + 2, n + 2));
}

GroupElement GroupElement::trusted(Mat m) {
  GroupElement g;
  g.m_ = std::move(m);
  return g;
}

GroupElement GroupElement::inverse() const {
  Mat J = minkowski_J(dim());
  return trusted(J * m_.transpose() * J);
}

std::string GroupElement::serialize() const {
  std::string out = "lorentz n=" + std::to_string(dim()) + "\n";
  char buf[64];
  for (int r = 0; r < m_.rows(); ++r) {
    for (int c = 0; c < m_.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m_(r, c));
      if (c) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

GroupElement GroupElement::parse(const std::string& text, double tol) {
  std::istringstream in(text);
  std::string head;
  std::getline(in, head);
  int n = 0;
  if (std::sscanf(head.c_str(), "lorentz n=%d", &n) != 1) throw DomainError("bad group element header");
  check_dimension(n);
  Mat m(n + 2, n + 2);
  for (int r = 0; r < n + 2; ++r)
    for (int c = 0; c < n + 2; ++c)
      if (!(in >> m(r, c))) throw DomainError("truncated group element body");
  return certify(m, tol);
}

static std::string default_label(GenKind kind, int i, int j) {
  switch (kind) {
    case GenKind::X: return "X";
    case GenKind::A: return "A" + std::to_string(i);
    case GenKind::R:
      if (i < 10 && j < 10) return "R" + std::to_string(i) + std::to_string(j);
      return "R" + std::to_string(i) + "_" + std::to_string(j);
    case GenKind::Uplus: return "U" + std::to_string(i) + "+";
    case GenKind::Uminus: return "U" + std::to_string(i) + "-";
  }
  return "";
}

LieAlgebraElement generator(GenKind kind, int i, int j, int n) {
  return {generator_matrix<double>(kind, i, j, n), default_label(kind, i, j)};
}

LieAlgebraElement parse_label(const std::string& s, int n) {
  if (s == "X") return generator(GenKind::X, 0, 0, n);
  if (s.size() >= 2 && s[0] == 'A') return generator(GenKind::A, std::stoi(s.substr(1)), 0, n);
  if (s.size() >= 3 && s[0] == 'R') {
    auto us = s.find('_');
    if (us != std::string::npos)
      return generator(GenKind::R, std::stoi(s.substr(1, us - 1)), std::stoi(s.substr(us + 1)), n);
    if (s.size() == 3) return generator(GenKind::R, s[1] - '0', s[2] - '0', n);
  }
  if (s.size() >= 3 && s[0] == 'U' && (s.back() == '+' || s.back() == '-')) {
    int i = std::stoi(s.substr(1, s.size() - 2));
    return generator(s.back() == '+' ? GenKind::Uplus : GenKind::Uminus, i, 0, n);
  }
  throw DomainError("unknown generator label '" + s + "'");
}

bool is_lie_algebra_element(const Mat& y, double tol) {
  if (y.rows() != y.cols() || y.rows() < 3) return false;
  Mat J = minkowski_J(lorentz_dim(y));
  return (y.transpose() * J + J * y).cwiseAbs().maxCoeff() <= tol;
}

LieAlgebraElement bracket(const LieAlgebraElement& y, const LieAlgebraElement& z) {
  if (y.m.rows() != z.m.rows()) throw DomainError("bracket: dimension mismatch");
  return {y.m * z.m - z.m * y.m, ""};
}

Mat exp_general(const Mat& y) { return y.exp(); }

static Mat boost_block(int n, int a, int b, double t) {
  Mat m = Mat::Identity(n + 2, n + 2);
  m(a, a) = m(b, b) = std::cosh(t);
  m(a, b) = m(b, a) = std::sinh(t);
  return m;
}

GroupElement exp_flow(const LieAlgebraElement& y, double t) {
  if (!std::isfinite(t)) throw DomainError("exp_flow: non-finite parameter");
  const int n = y.dim();
  const std::string& L = y.label;
  if (L == "X") return GroupElement::trusted(boost_block(n, 0, 1, t));
  if (!L.empty() && L[0] == 'A') {
    int k = std::stoi(L.substr(1));
    return GroupElement::trusted(boost_block(n, 0, k, t));
  }
  if (!L.empty() && L[0] == 'R') {
    int i = -1, j = -1;
    for (int r = 0; r < y.m.rows(); ++r)
      for (int c = 0; c < y.m.cols(); ++c)
        if (y.m(r, c) == 1.0) { i = r; j = c; }
    Mat m = Mat::Identity(n + 2, n + 2);
    m(i, i) = m(j, j) = std::cos(t);
    m(i, j) = std::sin(t);
    m(j, i) = -std::sin(t);
    return GroupElement::trusted(m);
  }
  Mat tm = t * y.m;
  Mat t2 = tm * tm;
  Mat t3 = t2 * tm;
  double scale = 1.0 + tm.cwiseAbs().maxCoeff();
  if (t3.cwiseAbs().maxCoeff() <= 1e-14 * scale * scale * scale)
    return GroupElement::trusted(Mat::Identity(n + 2, n + 2) + tm + 0.5 * t2);
  return GroupElement::trusted(exp_general(tm));
}

GroupElement a_of(double t, int n) { return GroupElement::trusted(boost_block(n, 0, 1, t)); }

GroupElement b_of(const Vec& v, Sign s) {
  const int n = static_cast<int>(v.size());
  check_dimension(n);
  const double sg = sign_value(s);
  const double q = v.squaredNorm();
  Mat m = Mat::Identity(n + 2, n + 2);
  m(0, 0) = 1 + q / 2;
  m(0, 1) = -sg * q / 2;
  m(1, 0) = sg * q / 2;
  m(1, 1) = 1 - q / 2;
  for (int i = 0; i < n; ++i) {
    m(0, 2 + i) = v[i];
    m(1, 2 + i) = sg * v[i];
    m(2 + i, 0) = v[i];
    m(2 + i, 1) = -sg * v[i];
  }
  return GroupElement::trusted(m);
}

Mat u_combination(const Vec& u, Sign s) {
  const int n = static_cast<int>(u.size());
  Mat m = Mat::Zero(n + 2, n + 2);
  for (int i = 0; i < n; ++i) m += u[i] * gen_U(s, i + 1, n).m;
  return m;
}

Mat v_combination(const Vec& v, Sign s) {
  const int n = static_cast<int>(v.size()) - 1;
  Mat m = u_combination(v.head(n), s);
  m += v[n] * gen_X(n).m;
  return m;
}

std::pair<Vec, Vec> geodesic_flow(const Vec& x, const Vec& xi, double t, double tol) {
  if (x.size() != xi.size()) throw DomainError("geodesic_flow: dimension mismatch");
  if (std::abs(minkowski_inner(x, x) + 1) > tol || x[0] <= 0 ||
      std::abs(minkowski_inner(xi, xi) - 1) > tol || std::abs(minkowski_inner(x, xi)) > tol)
    throw DomainError("geodesic_flow: point is not on the unit cosphere bundle");
  const double c = std::cosh(t), s = std::sinh(t);
  return {x * c + xi * s, x * s + xi * c};
}

std::pair<Vec, Vec> geodesic_flow_homogeneous(const Vec& x, const Vec& xi, double t) {
  const double p = std::sqrt(std::max(minkowski_inner(xi, xi), 0.0));
  if (!(p > 0)) throw DomainError("geodesic_flow_homogeneous: zero covector");
  Vec u = xi / p;
  const double c = std::cosh(t), s = std::sinh(t);
  return {x * c + u * s, p * (x * s + u * c)};
}

std::pair<Vec, Vec> frame_projection(const Mat& g) { return {g.col(0), g.col(1)}; }

Mat random_orthogonal(int d, Rng& rng, int det_sign) {
  Mat a(d, d);
  for (int i = 0; i < d; ++i) a.col(i) = random_normal(rng, d);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  if ((q.determinant() > 0) != (det_sign > 0)) q.col(0) = -q.col(0);
  return q;
}

GroupElement random_group_element(int n, Rng& rng, int factors, double scale) {
  Mat g = Mat::Identity(n + 2, n + 2);
  for (int f = 0; f < factors; ++f) {
    Mat y = Mat::Zero(n + 2, n + 2);
    y += scale * uniform(rng, -1, 1) * gen_X(n).m;
    for (int i = 1; i <= n; ++i) {
      y += scale * uniform(rng, -1, 1) * gen_U(Sign::Plus, i, n).m;
      y += scale * uniform(rng, -1, 1) * gen_U(Sign::Minus, i, n).m;
    }
    for (int i = 2; i <= n + 1; ++i)
      for (int j = i + 1; j <= n + 1; ++j) y += scale * uniform(rng, -1, 1) * generator(GenKind::R, i, j, n).m;
    g = g * exp_general(y);
  }
  return GroupElement::certify(g, 1e-8);
}

GroupElement random_standard_element(int n, int l, Rng& rng, double scale) {
  Mat y = Mat::Zero(n + 2, n + 2);
  for (int k = 1; k <= l; ++k) {
    Mat a = Mat::Zero(n + 2, n + 2);
    a(0, k) = a(k, 0) = 1;
    y += scale * uniform(rng, -1, 1) * a;
  }
  for (int i = 1; i <= l; ++i)
    for (int j = i + 1; j <= l; ++j) y += scale * uniform(rng, -1, 1) * generator(GenKind::R, i, j, n).m;
  return GroupElement::certify(exp_general(y), 1e-8);
}

}  // namespace hyplab
