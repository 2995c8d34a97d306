#include "hyplab/flowbox.hpp"

#include <algorithm>
#include <cmath>

namespace hyplab {

double chordal_distance(const PhasePoint& a, const PhasePoint& b) {
  const double ea = energy(a), eb = energy(b);
  if (!(ea > 0) || !(eb > 0)) throw DomainError("chordal_distance: zero covector");
  return std::sqrt((a.x - b.x).squaredNorm() + (a.xi / ea - b.xi / eb).squaredNorm());
}

bool MetricBallUnion::contains(const PhasePoint& p) const {
  if (everything) return true;
  for (const auto& b : balls)
    if (chordal_distance(p, b.center) < b.radius) return true;
  return false;
}

SetOracle MetricBallUnion::oracle() const {
  return [u = *this](const PhasePoint& p) { return u.contains(p); };
}

std::vector<Vec> ball_lattice(int dim, double radius, int k) {
  if (k < 1) throw DomainError("ball_lattice: need k >= 1");
  std::vector<Vec> out;
  std::vector<int> c(dim, 0);
  Vec p(dim);
  while (true) {
    for (int i = 0; i < dim; ++i) p[i] = k == 1 ? 0.0 : radius * (2.0 * c[i] / (k - 1) - 1);
    if (p.norm() <= radius * (1 + 1e-12)) out.push_back(p);
    int ax = 0;
    while (ax < dim && ++c[ax] >= k) {
      c[ax] = 0;
      ++ax;
    }
    if (ax == dim) break;
  }
  return out;
}

bool flowbox_misses(const SetOracle& omega, const GroupElement& q, const Vec& shift, double alpha, double nu,
                    double eps, Sign s, int k, int* checked) {
  const int n = q.dim();
  const auto us = ball_lattice(n, nu * alpha, k);
  const auto vs = ball_lattice(n + 1, eps, k);
  std::vector<Mat> ev;
  ev.reserve(vs.size());
  for (const auto& v : vs) ev.push_back(exp_general(v_combination(v, opposite(s))));
  int count = 0;
  bool miss = true;
  for (const auto& u : us) {
    // The U^s commute, so exp(U^s(u + shift)) = b(-(u + shift)).
    const Mat base = q.matrix() * b_of(-(u + shift), s).matrix();
    for (const auto& e : ev) {
      ++count;
      if (omega(phase_point_from_frame(base * e))) {
        miss = false;
        break;
      }
    }
    if (!miss) break;
  }
  if (checked) *checked += count;
  return miss;
}

FlowboxResult flowbox_porosity_sample(const SetOracle& omega, const GroupElement& q, double alpha, double nu,
                                      double eps, FlowboxMode mode, Sign s, int samples) {
  if (!is_group_element(q.matrix(), 1e-8)) throw DomainError("flowbox_porosity_sample: frame is not certified");
  if (!(alpha > 0 && nu > 0 && eps >= 0)) throw DomainError("flowbox_porosity_sample: need alpha, nu > 0, eps >= 0");
  if (samples < 1) throw DomainError("flowbox_porosity_sample: need samples >= 1");
  const int n = q.dim();
  std::vector<Vec> shifts;
  if (mode == FlowboxMode::Ball) {
    shifts = ball_lattice(n, alpha, samples);
  } else {
    for (const auto& t : ball_lattice(1, alpha, samples)) {
      Vec sh = Vec::Zero(n);
      sh[0] = t[0];
      shifts.push_back(sh);
    }
  }
  std::stable_sort(shifts.begin(), shifts.end(), [](const Vec& a, const Vec& b) { return a.norm() < b.norm(); });
  FlowboxResult res;
  for (const auto& sh : shifts) {
    ++res.shifts_tried;
    if (!flowbox_misses(omega, q, sh, alpha, nu, eps, s, samples, &res.points_checked)) continue;
    // Accept only if the box still misses on the doubled lattice.
    if (!flowbox_misses(omega, q, sh, alpha, nu, eps, s, 2 * samples - 1, &res.points_checked)) continue;
    res.found = true;
    res.shift = sh;
    res.t0 = mode == FlowboxMode::Line ? sh[0] : 0.0;
    return res;
  }
  return res;
}

bool propagated_support_member(const PhasePoint& p, const Word& word, const SetOracle& chi1, const SetOracle& chi2,
                               Sign s) {
  if (word.letters.empty()) throw DomainError("propagated_support_member: empty word");
  const double e = energy(p);
  if (!(e >= 0.25 && e <= 4)) return false;
  const int T = static_cast<int>(word.size());
  for (int k = 0; k < T; ++k) {
    const int letter = word.letters[k];
    // Minus: times 0..T-1 forward; Plus: times 1..T backward.
    const double t = s == Sign::Minus ? double(k) : -double(k + 1);
    auto [x, xi] = geodesic_flow_homogeneous(p.x, p.xi, t);
    const PhasePoint q{x, xi};
    if (!(letter == 1 ? chi1(q) : chi2(q))) return false;
  }
  return true;
}

}  // namespace hyplab
