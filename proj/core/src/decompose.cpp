#include "hyplab/lorentz.hpp"

#include <cmath>

namespace hyplab {

bool in_K(const Mat& k, double tol) {
  if (!is_group_element(k, tol)) return false;
  const int d = static_cast<int>(k.rows());
  Vec e0 = Vec::Zero(d);
  e0[0] = 1;
  return (k.col(0) - e0).cwiseAbs().maxCoeff() <= tol && (k.row(0).transpose() - e0).cwiseAbs().maxCoeff() <= tol;
}

bool in_K0(const Mat& k, double tol) {
  if (!in_K(k, tol)) return false;
  const int d = static_cast<int>(k.rows());
  Vec e1 = Vec::Zero(d);
  e1[1] = 1;
  return (k.col(1) - e1).cwiseAbs().maxCoeff() <= tol && (k.row(1).transpose() - e1).cwiseAbs().maxCoeff() <= tol;
}

KanFactors kan_decompose(const GroupElement& g, Sign s, const Tolerances& tol) {
  const int n = g.dim();
  if (!is_group_element(g.matrix(), tol.group))
    throw CertificationError("kan_decompose: input is not a certified group element");
  // y = g^{-1} e0 = b(v)^{-1} a(t)^{-1} e0 because k fixes e0.
  Vec y = g.inverse().matrix().col(0);
  double t;
  Vec v;
  if (s == Sign::Plus) {
    t = std::log(y[0] - y[1]);
    v = -y.tail(n) * std::exp(-t);
  } else {
    t = -std::log(y[0] + y[1]);
    v = -y.tail(n) * std::exp(t);
  }
  GroupElement a = a_of(t, n);
  GroupElement b = b_of(v, s);
  Mat k = g.matrix() * b_of(-v, s).matrix() * a_of(-t, n).matrix();
  if (!in_K(k, 100 * tol.group))
    throw CertificationError("kan_decompose: K-factor failed certification (ill-conditioned input)");
  // Lightcone cross-check: g applied to the null vector fixed by N^{sign} scales by e^{+-t}.
  Vec w = Vec::Zero(n + 2);
  w[0] = 1;
  w[1] = sign_value(s);
  double scale = (g.matrix() * w)[0];
  if (std::abs(scale - std::exp(sign_value(s) * t)) > 1e-8 * std::max(1.0, scale))
    throw CertificationError("kan_decompose: lightcone scaling mismatch");
  KanFactors f{GroupElement::trusted(k), a, b, t, v, s};
  Mat recon = f.k.matrix() * a.matrix() * b.matrix();
  double err = (recon - g.matrix()).cwiseAbs().maxCoeff() / std::max(1.0, g.matrix().cwiseAbs().maxCoeff());
  if (err > tol.recon) throw CertificationError("kan_decompose: reconstruction error " + std::to_string(err));
  return f;
}

static bool block_identity_rest(const Mat& g, int l, double tol) {
  const int d = static_cast<int>(g.rows());
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      bool inB = r <= l && c <= l;
      if (inB) continue;
      double want = (r == c) ? 1.0 : 0.0;
      if (std::abs(g(r, c) - want) > tol) return false;
    }
  return true;
}

static bool in_SO0_block(const Mat& b, double tol) {
  const int d = static_cast<int>(b.rows());
  Mat J = Mat::Identity(d, d);
  J(0, 0) = -1;
  if ((b.transpose() * J * b - J).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(b.determinant() - 1) > tol) return false;
  return b(0, 0) > 0;
}

bool standard_subgroup_member(const Mat& g, int l, double tol) {
  const int n = lorentz_dim(g);
  if (l < 2 || l > n + 1) throw DomainError("standard_subgroup_member: need 2 <= l <= n+1");
  if (!block_identity_rest(g, l, tol)) return false;
  return in_SO0_block(g.topLeftCorner(l + 1, l + 1), tol);
}

bool normalizer_member(const Mat& g, int l, double tol) {
  const int n = lorentz_dim(g);
  if (l < 2 || l > n) throw DomainError("normalizer_member: need 2 <= l <= n");
  if (!is_group_element(g, tol)) return false;
  const int q = n - l + 1;
  if (g.topRightCorner(l + 1, q).cwiseAbs().maxCoeff() > tol) return false;
  if (g.bottomLeftCorner(q, l + 1).cwiseAbs().maxCoeff() > tol) return false;
  Mat B = g.topLeftCorner(l + 1, l + 1);
  Mat Q = g.bottomRightCorner(q, q);
  Mat J = Mat::Identity(l + 1, l + 1);
  J(0, 0) = -1;
  if ((B.transpose() * J * B - J).cwiseAbs().maxCoeff() > tol) return false;
  if (!(B(0, 0) > 0)) return false;
  if ((Q.transpose() * Q - Mat::Identity(q, q)).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(B.determinant() * Q.determinant() - 1) <= tol;
}

bool normalizer_member_by_conjugation(const Mat& g, int l, Rng& rng, int samples, double tol) {
  const int n = lorentz_dim(g);
  if (!is_group_element(g, tol)) return false;
  Mat gi = GroupElement::trusted(g).inverse().matrix();
  for (int s = 0; s < samples; ++s) {
    Mat w = random_standard_element(n, l, rng).matrix();
    if (!standard_subgroup_member(g * w * gi, l, tol)) return false;
  }
  return true;
}

Mat k_reflection(int n, int l) {
  Mat k = Mat::Identity(n + 2, n + 2);
  k(l, l) = -1;
  return k;
}

NormalizerSplit normalizer_decompose(const GroupElement& g, int l, const Tolerances& tol) {
  const int n = g.dim();
  if (!normalizer_member(g.matrix(), l, tol.group))
    throw DomainError("normalizer_decompose: input is not in the normalizer of W_l");
  const int q = n - l + 1;
  Mat B = g.matrix().topLeftCorner(l + 1, l + 1);
  Mat Q = g.matrix().bottomRightCorner(q, q);
  Mat w = Mat::Identity(n + 2, n + 2);
  Mat k = Mat::Identity(n + 2, n + 2);
  k.bottomRightCorner(q, q) = Q;
  NormalizerKind kind;
  if (B.determinant() > 0) {
    w.topLeftCorner(l + 1, l + 1) = B;
    kind = NormalizerKind::Centralizing;
  } else {
    Mat kl = k_reflection(n, l);
    w.topLeftCorner(l + 1, l + 1) = B * kl.topLeftCorner(l + 1, l + 1);
    k = kl * k;
    kind = NormalizerKind::Flipped;
  }
  if (!standard_subgroup_member(w, l, 100 * tol.group) || !in_K0(k, 100 * tol.group))
    throw CertificationError("normalizer_decompose: factors failed certification");
  double err = (w * k - g.matrix()).cwiseAbs().maxCoeff();
  if (err > tol.recon) throw CertificationError("normalizer_decompose: reconstruction error");
  return {GroupElement::trusted(w), GroupElement::trusted(k), kind};
}

bool ku_member(const Mat& k, double tol) {
  if (!in_K0(k, tol)) return false;
  const int n = lorentz_dim(k);
  // Block on coordinates 2..n+1 must be diag(+-1, Q').
  Mat Kb = k.bottomRightCorner(n, n);
  if (n >= 2) {
    if (Kb.row(0).tail(n - 1).cwiseAbs().maxCoeff() > tol) return false;
    if (Kb.col(0).tail(n - 1).cwiseAbs().maxCoeff() > tol) return false;
  }
  return std::abs(std::abs(Kb(0, 0)) - 1) <= tol;
}

bool ku_member_by_conjugation(const Mat& k, double tol) {
  if (!in_K0(k, tol)) return false;
  const int n = lorentz_dim(k);
  Mat ki = GroupElement::trusted(k).inverse().matrix();
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    Mat u = gen_U(s, 1, n).m;
    Mat c = k * u * ki;
    double lam = (c.cwiseProduct(u)).sum() / u.squaredNorm();
    if ((c - lam * u).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

}  // namespace hyplab
