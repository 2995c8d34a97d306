#pragma once

// Minkowski space R^{1,n+1}, the group SO_0(1,n+1) and its Lie algebra frame.

#include "hyplab/common.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hyplab {

// Coordinates x_0..x_{n+1}; x_0 is timelike.
using LorentzVector = Vec;

struct Tolerances {
  double group = 1e-10;
  double recon = 1e-10;
};

inline int lorentz_dim(const Vec& v) { return static_cast<int>(v.size()) - 2; }
inline int lorentz_dim(const Mat& m) { return static_cast<int>(m.rows()) - 2; }

void check_dimension(int n);

Mat minkowski_J(int n);
double minkowski_inner(const Vec& u, const Vec& v);
LorentzVector basis_vector(int n, int k);

enum class PointClass { Hyperboloid, Boundary, Neither };
PointClass classify_point(const Vec& v, double tol = 1e-10);
const char* point_class_name(PointClass c);

bool is_group_element(const Mat& m, double tol = 1e-10);

// Largest violation among the three group invariants (0 when exact).
double group_defect(const Mat& m);

class GroupElement {
 public:
  GroupElement() = default;
  // Throws CertificationError unless is_group_element(m, tol).
  static GroupElement certify(const Mat& m, double tol = 1e-10);
  static GroupElement identity(int n);
  // No check; for products of certified factors.
  static GroupElement trusted(Mat m);

  const Mat& matrix() const { return m_; }
  int dim() const { return lorentz_dim(m_); }
  GroupElement inverse() const;  // J M^T J
  GroupElement operator*(const GroupElement& o) const { return trusted(m_ * o.m_); }
  Vec apply(const Vec& v) const { return m_ * v; }

  std::string serialize() const;
  static GroupElement parse(const std::string& text, double tol = 1e-10);

 private:
  Mat m_;
};

enum class GenKind { X, A, R, Uplus, Uminus };

struct LieAlgebraElement {
  Mat m;
  std::string label;  // "X", "A2", "R23", "U1+", "U1-" or "" for composites
  int dim() const { return lorentz_dim(m); }
};

// Exact sparse generator over any scalar type with integer literals.
// A: i = k in 2..n+1.  R: R_{i,j} with 1 <= i != j <= n+1.  U: i in 1..n.
template <class S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> generator_matrix(GenKind kind, int i, int j, int n,
                                                                  bool flip_u1_plus = false) {
  check_dimension(n);
  const int d = n + 2;
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> m(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m(r, c) = S(0);
  auto E = [&](int r, int c, int v) { m(r, c) += S(v); };
  switch (kind) {
    case GenKind::X:
      E(0, 1, 1);
      E(1, 0, 1);
      break;
    case GenKind::A:
      if (i < 2 || i > n + 1) throw DomainError("A_k needs 2 <= k <= n+1");
      E(0, i, 1);
      E(i, 0, 1);
      break;
    case GenKind::R:
      if (i < 1 || j < 1 || i > n + 1 || j > n + 1 || i == j)
        throw DomainError("R_{i,j} needs 1 <= i != j <= n+1");
      E(i, j, 1);
      E(j, i, -1);
      break;
    case GenKind::Uplus:
    case GenKind::Uminus: {
      if (i < 1 || i > n) throw DomainError("U_i needs 1 <= i <= n");
      int rs = (kind == GenKind::Uplus) ? -1 : 1;
      if (flip_u1_plus && kind == GenKind::Uplus && i == 1) rs = -rs;
      E(0, i + 1, -1);
      E(i + 1, 0, -1);
      E(1, i + 1, rs);
      E(i + 1, 1, -rs);
      break;
    }
  }
  return m;
}

LieAlgebraElement generator(GenKind kind, int i, int j, int n);
inline LieAlgebraElement gen_X(int n) { return generator(GenKind::X, 0, 0, n); }
inline LieAlgebraElement gen_U(Sign s, int i, int n) {
  return generator(s == Sign::Plus ? GenKind::Uplus : GenKind::Uminus, i, 0, n);
}
LieAlgebraElement parse_label(const std::string& label, int n);

bool is_lie_algebra_element(const Mat& y, double tol = 1e-10);
LieAlgebraElement bracket(const LieAlgebraElement& y, const LieAlgebraElement& z);

// One relation of the commutator table, with its residual max|lhs - rhs|.
template <class S>
struct Relation {
  std::string name;
  S residual;
};

template <class S>
S max_abs_entry(const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>& m) {
  S best = S(0);
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      S a = m(r, c) < S(0) ? S(-m(r, c)) : S(m(r, c));
      if (best < a) best = a;
    }
  return best;
}

// Full commutator table of the frame for dimension n.
template <class S>
std::vector<Relation<S>> commutator_table(int n, bool flip_u1_plus = false) {
  using M = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  auto g = [&](GenKind k, int i, int j) { return generator_matrix<S>(k, i, j, n, flip_u1_plus); };
  // Plain loops: Eigen's product overloads do not resolve for Boost multiprecision scalars.
  auto mul = [](const M& a, const M& b) {
    M c = M::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index k = 0; k < a.cols(); ++k)
        if (a(i, k) != S(0))
          for (Eigen::Index j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    return c;
  };
  auto br = [&](const M& a, const M& b) -> M {
    M c = mul(a, b);
    c -= mul(b, a);
    return c;
  };
  auto twice = [](const M& a) {
    M c = a;
    c += a;
    return c;
  };
  auto U = [&](int s, int i) { return g(s > 0 ? GenKind::Uplus : GenKind::Uminus, i, 0); };
  auto sname = [](int s) { return s > 0 ? std::string("+") : std::string("-"); };
  const M X = g(GenKind::X, 0, 0);
  const M zero = M::Zero(n + 2, n + 2);
  std::vector<Relation<S>> out;
  auto add = [&](std::string name, const M& lhs, const M& rhs) {
    M diff = lhs;
    diff -= rhs;
    out.push_back({std::move(name), max_abs_entry<S>(diff)});
  };
  for (int i = 1; i <= n; ++i) {
    for (int s : {1, -1}) {
      M sc = U(s, i);
      if (s < 0) sc = -sc;
      add("[X,U" + std::to_string(i) + sname(s) + "]=" + sname(s) + "U" + std::to_string(i) + sname(s),
          br(X, U(s, i)), sc);
    }
    add("[U" + std::to_string(i) + "+,U" + std::to_string(i) + "-]=2X", br(U(1, i), U(-1, i)),
        twice(X));
  }
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      std::string is = std::to_string(i), js = std::to_string(j);
      for (int s : {1, -1}) {
        add("[U" + is + sname(s) + ",U" + js + sname(s) + "]=0", br(U(s, i), U(s, j)), zero);
        add("[U" + is + sname(s) + ",U" + js + sname(-s) + "]=2R" + std::to_string(i + 1) +
                std::to_string(j + 1),
            br(U(s, i), U(-s, j)), twice(g(GenKind::R, i + 1, j + 1)));
      }
      const M R = g(GenKind::R, i + 1, j + 1);
      add("[R" + std::to_string(i + 1) + std::to_string(j + 1) + ",X]=0", br(R, X), zero);
      for (int k = 1; k <= n; ++k)
        for (int s : {1, -1}) {
          M rhs = zero;
          if (j == k) rhs += U(s, i);
          if (i == k) rhs -= U(s, j);
          add("[R" + std::to_string(i + 1) + std::to_string(j + 1) + ",U" + std::to_string(k) +
                  sname(s) + "]",
              br(R, U(s, k)), rhs);
        }
    }
  return out;
}

// exp(tY); closed forms for X, A_k, R_{ij} and nilpotent (horocyclic) directions.
GroupElement exp_flow(const LieAlgebraElement& y, double t);
// Same with no closed-form dispatch (general Pade scaling-and-squaring).
Mat exp_general(const Mat& y);

// A-factor a(t) = exp(tX).
GroupElement a_of(double t, int n);
// Horospherical element with the block pattern of N^{sign}; equals exp(-sum v_i U_i^sign).
GroupElement b_of(const Vec& v, Sign s);
Mat u_combination(const Vec& u, Sign s);  // sum u_i U_i^sign
Mat v_combination(const Vec& v, Sign s);  // sum_{i<=n} v_i U_i^sign + v_{n+1} X

// Geodesic flow on the unit cosphere bundle; throws if (x, xi) is off it beyond tol.
std::pair<Vec, Vec> geodesic_flow(const Vec& x, const Vec& xi, double t, double tol = 1e-9);
// Homogeneous extension to T*H \ 0.
std::pair<Vec, Vec> geodesic_flow_homogeneous(const Vec& x, const Vec& xi, double t);
// pi_S(g) = (g e0, g e1).
std::pair<Vec, Vec> frame_projection(const Mat& g);

struct KanFactors {
  GroupElement k, a, b;
  double t = 0.0;
  Vec v;
  Sign sign = Sign::Plus;
};

// g = k a(t) b(v) with k in K, a in A, b in N^{sign}.
KanFactors kan_decompose(const GroupElement& g, Sign s, const Tolerances& tol = {});

bool in_K(const Mat& k, double tol = 1e-10);
bool in_K0(const Mat& k, double tol = 1e-10);

bool standard_subgroup_member(const Mat& g, int l, double tol = 1e-10);
bool normalizer_member(const Mat& g, int l, double tol = 1e-10);
// Cross-check: g w g^{-1} in W_l for `samples` random w in W_l.
bool normalizer_member_by_conjugation(const Mat& g, int l, Rng& rng, int samples = 20,
                                      double tol = 1e-8);

enum class NormalizerKind { Centralizing, Flipped };
struct NormalizerSplit {
  GroupElement w, k;
  NormalizerKind kind;
};
NormalizerSplit normalizer_decompose(const GroupElement& g, int l, const Tolerances& tol = {});
Mat k_reflection(int n, int l);  // identity with -1 at index l

bool ku_member(const Mat& k, double tol = 1e-10);
// Cross-check: k U_1^{+-} k^{-1} stays on the line spanned by U_1^{+-}.
bool ku_member_by_conjugation(const Mat& k, double tol = 1e-8);

// Random certified elements.
GroupElement random_group_element(int n, Rng& rng, int factors = 5, double scale = 1.0);
GroupElement random_standard_element(int n, int l, Rng& rng, double scale = 1.0);
Mat random_orthogonal(int d, Rng& rng, int det_sign);

}  // namespace hyplab
