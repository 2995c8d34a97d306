#include "hyplab/porosity.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace hyplab {

namespace {

PorosityReport run_check(const BoxSet& x, PorosityKind kind, double nu, double a0, double a1, int directions) {
  return kind == PorosityKind::Ball ? ball_porosity_check(x, nu, a0, a1)
                                    : line_porosity_check(x, nu, a0, a1, directions);
}

double completeness(PorosityKind kind, int n) {
  return kind == PorosityKind::Ball ? ball_completeness_cells(n) : line_completeness_cells(n);
}

double anchor(PorosityKind kind, int n) { return kind == PorosityKind::Ball ? 1.0 : line_anchor_factor(n); }

// Largest nu the checker is guaranteed to certify for a set whose clearance at every tested
// scale R >= r_min is at least nu_true R - loss_cells * delta.
double certifiable_nu(PorosityKind kind, int n, double nu_true, double loss_cells, double delta, double r_min) {
  return (nu_true - (loss_cells + completeness(kind, n)) * delta / r_min) / anchor(kind, n);
}

bool feasible(const BoxSet& x, double nu, double a0) { return nu > 0 && x.delta() <= nu * a0 / 4; }

}  // namespace

double ball_completeness_cells(int n) { return 2 * std::sqrt(double(n)) + 0.5; }

double line_completeness_cells(int n) {
  if (n == 1) return ball_completeness_cells(1);
  return 1.5 * std::sqrt(double(n)) + 0.75;
}

double line_anchor_factor(int n) { return n == 1 ? 1.0 : 1.0 + std::sqrt(double(n)) / 8; }

void LemmaStats::add(const LemmaTrial& t) {
  ++trials;
  if (!t.hypothesis) ++vacuous;
  if (t.violation) ++violations;
}

BoxSet affine_image(const BoxSet& x, double lambda, const Vec& y) {
  if (!(lambda > 0)) throw DomainError("affine_image: lambda must be positive");
  if (y.size() != x.n) throw DomainError("affine_image: translation dimension mismatch");
  BoxSet out = BoxSet::make_empty(x.n, x.m);
  const int n = x.n;
  std::vector<int> c0(n), c1(n), c(n);
  for (std::size_t idx = 0; idx < x.mask.size(); ++idx) {
    if (!x.mask[idx]) continue;
    auto b = x.coords(idx);
    bool hit = true;
    for (int i = 0; i < n; ++i) {
      const double lo = y[i] * x.m + lambda * b[i];
      const double hi = y[i] * x.m + lambda * (b[i] + 1);
      // Contacts thinner than 1e-9 cells are treated as boundary contacts.
      c0[i] = std::max(0, static_cast<int>(std::floor(lo + 1e-9)));
      c1[i] = std::min(x.m - 1, static_cast<int>(std::ceil(hi - 1e-9)) - 1);
      if (c1[i] < c0[i]) hit = false;
    }
    if (!hit) continue;
    c = c0;
    while (true) {
      out.set(c);
      int ax = 0;
      while (ax < n && ++c[ax] > c1[ax]) {
        c[ax] = c0[ax];
        ++ax;
      }
      if (ax == n) break;
    }
  }
  if (!x.empty_set() && out.empty_set()) throw DomainError("affine_image: image misses the unit cube");
  return out;
}

BoxSet neighborhood(const BoxSet& x, double alpha2) {
  if (!(alpha2 >= x.delta() * (1 - 1e-12))) throw DomainError("neighborhood: alpha2 below resolution");
  BoxSet out = BoxSet::make_empty(x.n, x.m);
  if (x.empty_set()) return out;
  const int n = x.n, L = x.m + 2;
  std::vector<int> shape(n, L);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= L;
  std::vector<std::uint8_t> occ(total, 0);
  auto pidx = [&](const std::vector<int>& j) {
    std::size_t idx = 0, stride = 1;
    for (int i = 0; i < n; ++i) {
      idx += stride * j[i];
      stride *= L;
    }
    return idx;
  };
  for (std::size_t idx = 0; idx < x.mask.size(); ++idx) {
    if (!x.mask[idx]) continue;
    auto c = x.coords(idx);
    for (auto& v : c) v += 1;
    occ[pidx(c)] = 1;
  }
  const auto d2 = edt_squared(occ, shape);
  const double lim = alpha2 * x.m;
  const double lim2 = lim * lim;
  int offsets = 1;
  for (int i = 0; i < n; ++i) offsets *= 3;
  std::vector<int> j(n);
  for (std::size_t idx = 0; idx < out.mask.size(); ++idx) {
    auto c = out.coords(idx);
    double best = std::numeric_limits<double>::infinity();
    for (int o = 0; o < offsets; ++o) {
      int code = o;
      for (int i = 0; i < n; ++i) {
        j[i] = c[i] + 1 + (code % 3) - 1;
        code /= 3;
      }
      best = std::min(best, d2[pidx(j)]);
    }
    out.mask[idx] = best < lim2;
  }
  return out;
}

SmoothMap identity_map(int n) {
  return {"identity", [](const Vec& x) { return x; }, [n](const Vec&) { return Mat(Mat::Identity(n, n)); }};
}

SmoothMap linear_map(const Mat& a) {
  if (a.rows() != a.cols()) throw DomainError("linear_map: matrix must be square");
  return {"linear", [a](const Vec& x) { return Vec(a * x); }, [a](const Vec&) { return a; }};
}

SmoothMap sine_perturbation(int n, double amp) {
  if (!(2 * M_PI * std::abs(amp) < 1)) throw DomainError("sine_perturbation: map is not invertible");
  return {"sine",
          [amp](const Vec& x) {
            Vec y = x;
            for (int i = 0; i < x.size(); ++i) y[i] += amp * std::sin(2 * M_PI * x[i]);
            return y;
          },
          [amp, n](const Vec& x) {
            Mat j = Mat::Zero(n, n);
            for (int i = 0; i < n; ++i) j(i, i) = 1 + 2 * M_PI * amp * std::cos(2 * M_PI * x[i]);
            return j;
          }};
}

double sine_perturbation_C1(double amp) {
  const double a = 2 * M_PI * std::abs(amp);
  if (!(a < 1)) throw DomainError("sine_perturbation_C1: map is not invertible");
  return 1 / (1 - a);
}

double sine_perturbation_C2(double amp) {
  const double a = 2 * M_PI * amp;
  double best = 0;
  const int N = 200000;
  for (int k = 0; k <= N; ++k) {
    const double x = double(k) / N;
    const double d1 = 1 + a * std::cos(2 * M_PI * x);
    const double d2 = -2 * M_PI * a * std::sin(2 * M_PI * x);
    best = std::max(best, std::abs(d2) / (d1 * d1 * d1));
  }
  return best * (1 + 1e-3);
}

double estimate_C1(const SmoothMap& kappa, int n, int samples, Rng& rng) {
  double c = 1;
  for (int s = 0; s < samples; ++s) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = uniform(rng, 0, 1);
    Mat j;
    if (kappa.jacobian) {
      j = kappa.jacobian(x);
    } else {
      j.resize(n, n);
      const double e = 1e-6;
      for (int i = 0; i < n; ++i) {
        Vec xp = x, xm = x;
        xp[i] += e;
        xm[i] -= e;
        j.col(i) = (kappa.f(xp) - kappa.f(xm)) / (2 * e);
      }
    }
    Eigen::JacobiSVD<Mat> svd(j);
    const auto& sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    if (!(smin > 1e-12)) throw DomainError("estimate_C1: non-invertibility detected");
    c = std::max({c, sv[0], 1 / smin});
  }
  return c;
}

BoxSet bilipschitz_image(const BoxSet& x, const SmoothMap& kappa, double C1) {
  if (!(C1 >= 1)) throw DomainError("bilipschitz_image: C1 must be >= 1");
  const int n = x.n;
  BoxSet out = BoxSet::make_empty(n, x.m);
  const double rho = C1 * std::sqrt(double(n)) / 2 * x.delta();
  std::vector<int> c0(n), c1(n), c(n);
  for (std::size_t idx = 0; idx < x.mask.size(); ++idx) {
    if (!x.mask[idx]) continue;
    auto b = x.coords(idx);
    // Corner images bound the image cell for linear and coordinatewise monotone maps.
    for (int corner = 0; corner < (1 << n); ++corner) {
      Vec q(n);
      for (int i = 0; i < n; ++i) q[i] = (b[i] + ((corner >> i) & 1)) * x.delta();
      Vec fq = kappa.f(q);
      for (int i = 0; i < n; ++i)
        if (fq[i] < -1e-12 || fq[i] > 1 + 1e-12) throw DomainError("bilipschitz_image: image leaves the unit cube");
    }
    const Vec p = kappa.f(x.cell_center(idx));
    for (int i = 0; i < n; ++i) {
      c0[i] = std::max(0, static_cast<int>(std::floor((p[i] - rho) * x.m)));
      c1[i] = std::min(x.m - 1, static_cast<int>(std::floor((p[i] + rho) * x.m)));
    }
    c = c0;
    while (true) {
      double d2 = 0;
      for (int i = 0; i < n; ++i) {
        const double lo = c[i] * x.delta(), hi = (c[i] + 1) * x.delta();
        const double g = std::max({lo - p[i], 0.0, p[i] - hi});
        d2 += g * g;
      }
      if (d2 <= rho * rho) out.set(c);
      int ax = 0;
      while (ax < n && ++c[ax] > c1[ax]) {
        c[ax] = c0[ax];
        ++ax;
      }
      if (ax == n) break;
    }
  }
  return out;
}

LemmaTrial verify_affine(const BoxSet& x, PorosityKind kind, double nu, double alpha0, double alpha1, double lambda,
                         const Vec& y, int directions) {
  LemmaTrial t;
  t.nu_in = nu;
  t.hypothesis = run_check(x, kind, nu, alpha0, alpha1, directions).verdict == Verdict::CertifiedPorous;
  if (!t.hypothesis) return t;
  BoxSet img = affine_image(x, lambda, y);
  const int n = x.n;
  t.alpha0_out = lambda * alpha0;
  t.alpha1_out = lambda * alpha1;
  // Rasterization adds at most one cell diagonal to the image.
  t.nu_out = certifiable_nu(kind, n, nu, std::sqrt(double(n)), x.delta(), t.alpha0_out);
  if (!feasible(img, t.nu_out, t.alpha0_out)) {
    t.hypothesis = false;
    return t;
  }
  t.conclusion = run_check(img, kind, t.nu_out, t.alpha0_out, t.alpha1_out, directions).verdict;
  t.violation = t.conclusion != Verdict::CertifiedPorous;
  return t;
}

LemmaTrial verify_neighborhood(const BoxSet& x, PorosityKind kind, double nu, double alpha0, double alpha1,
                               double alpha2, int directions) {
  LemmaTrial t;
  t.nu_in = nu;
  const int n = x.n;
  // The rasterized neighborhood lies inside the exact neighborhood of radius alpha2 + sqrt(n) delta.
  const double a2 = alpha2 + std::sqrt(double(n)) * x.delta();
  if (a2 > nu / 2 * alpha1) throw DomainError("verify_neighborhood: need alpha2 <= (nu/2) alpha1");
  t.hypothesis = run_check(x, kind, nu, alpha0, alpha1, directions).verdict == Verdict::CertifiedPorous;
  if (!t.hypothesis) return t;
  // Start on the hypothesis ladder so every tested scale was certified for X.
  double a0 = alpha0;
  const double need = std::max(alpha0, 2 * a2 / nu);
  for (double R : scale_ladder(alpha0, alpha1)) {
    a0 = R;
    if (R >= need) break;
  }
  if (a0 < need) {
    t.hypothesis = false;
    return t;
  }
  BoxSet nb = neighborhood(x, alpha2);
  t.alpha0_out = a0;
  t.alpha1_out = alpha1;
  t.nu_out = certifiable_nu(kind, n, nu / 2, 0.0, x.delta(), a0);
  if (!feasible(nb, t.nu_out, a0)) {
    t.hypothesis = false;
    return t;
  }
  t.conclusion = run_check(nb, kind, t.nu_out, a0, alpha1, directions).verdict;
  t.violation = t.conclusion != Verdict::CertifiedPorous;
  return t;
}

LemmaTrial verify_bilipschitz(const BoxSet& x, PorosityKind kind, const SmoothMap& kappa, double C1, double C2,
                              double nu, double alpha0, double alpha1, int directions) {
  LemmaTrial t;
  t.nu_in = nu;
  const int n = x.n;
  if (kind == PorosityKind::Line) {
    if (n != 1) throw DomainError("verify_bilipschitz: line transfer is verified in one dimension only");
    if (alpha1 > nu / (C1 * C2 * n)) throw DomainError("verify_bilipschitz: scale cap alpha1 <= nu/(C1 C2 n) violated");
  }
  BoxSet img = bilipschitz_image(x, kappa, C1);
  t.hypothesis = run_check(img, kind, nu, alpha0, alpha1, directions).verdict == Verdict::CertifiedPorous;
  if (!t.hypothesis) return t;
  const double nu_true = kind == PorosityKind::Ball ? nu / (C1 * C1) : nu / (2 * C1 * C1);
  t.alpha0_out = C1 * alpha0;
  t.alpha1_out = C1 * alpha1;
  t.nu_out = certifiable_nu(kind, n, nu_true, 0.0, x.delta(), t.alpha0_out);
  if (!feasible(x, t.nu_out, t.alpha0_out)) {
    t.hypothesis = false;
    return t;
  }
  t.conclusion = run_check(x, kind, t.nu_out, t.alpha0_out, t.alpha1_out, directions).verdict;
  t.violation = t.conclusion != Verdict::CertifiedPorous;
  return t;
}

}  // namespace hyplab

namespace hyplab {

const char* lemma_kind_name(LemmaKind k) {
  switch (k) {
    case LemmaKind::Affine:
      return "affine";
    case LemmaKind::Neighborhood:
      return "neighborhood";
    default:
      return "bilipschitz";
  }
}

BoxSet random_cantor(int n, int max_cells, Rng& rng) {
  std::uniform_int_distribution<int> base_d(3, 5);
  for (;;) {
    CantorSpec s;
    s.base = base_d(rng);
    for (int a = 0; a < n; ++a) {
      std::vector<int> all(s.base);
      for (int i = 0; i < s.base; ++i) all[i] = i;
      std::shuffle(all.begin(), all.end(), rng);
      const int keep = std::uniform_int_distribution<int>(1, s.base - 1)(rng);
      std::vector<int> d(all.begin(), all.begin() + keep);
      std::sort(d.begin(), d.end());
      s.digits.push_back(d);
    }
    s.depth = 0;
    long cells = 1;
    while (cells * s.base <= max_cells) {
      cells *= s.base;
      ++s.depth;
    }
    if (s.depth < 2) continue;
    const BoxSet x = cantor_generate(s, n);
    const int factor = static_cast<int>(max_cells / cells);
    return factor > 1 ? refine(x, factor) : x;
  }
}

namespace {

double draw(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

}  // namespace

LemmaStats run_lemma_trials(LemmaKind lemma, PorosityKind kind, const LemmaSuiteOptions& opt) {
  LemmaStats st;
  st.name = std::string(lemma_kind_name(lemma)) + "/" + porosity_kind_name(kind);
  Rng rng(opt.seed ^ (0x9e3779b97f4a7c15ULL * (1 + static_cast<int>(lemma) * 2 + static_cast<int>(kind))));
  const SmoothMap sine1 = sine_perturbation(1, 0.05), sine2 = sine_perturbation(2, 0.05);
  const double C1 = sine_perturbation_C1(0.05);
  const double C2 = sine_perturbation_C2(0.05);
  for (int t = 0; t < opt.trials; ++t) {
    const bool plane = kind == PorosityKind::Ball && draw(rng, 0, 1) < opt.two_d_fraction;
    const int n = plane ? 2 : 1;
    LemmaTrial tr;
    if (lemma == LemmaKind::BiLipschitz && kind == PorosityKind::Line) {
      const BoxSet x = random_cantor(1, 600000, rng);
      const double nu = draw(rng, 0.08, 0.2);
      const double a1 = nu / (C1 * C2) * draw(rng, 0.7, 1.0);
      const double a0 = std::min(a1, std::max(a1 / draw(rng, 1.5, 3.0), 8 * x.delta() / nu));
      tr = verify_bilipschitz(x, kind, sine1, C1, C2, nu, a0, a1);
    } else {
      const BoxSet x = random_cantor(n, plane ? 243 : 3200, rng);
      const double d = x.delta();
      const double nu = plane ? draw(rng, 0.1, 0.2) : draw(rng, 0.05, 0.15);
      const double a0 = std::min(0.5, draw(rng, 30, 80) * d / nu);
      const double a1 = std::min(1.0, a0 * draw(rng, 1.5, 4.0));
      switch (lemma) {
        case LemmaKind::Affine: {
          const double lambda = draw(rng, 0.5, 1.0);
          Vec y(n);
          for (int i = 0; i < n; ++i) y[i] = draw(rng, 0, 1 - lambda);
          tr = verify_affine(x, kind, nu, a0, a1, lambda, y);
          break;
        }
        case LemmaKind::Neighborhood: {
          const double cap = nu / 2 * a1 - std::sqrt(double(n)) * d;
          const double a2 = cap > d ? draw(rng, d, cap) : d;
          if (cap < d) {
            st.add(tr);  // scales too small for any dilation at this resolution
            continue;
          }
          tr = verify_neighborhood(x, kind, nu, a0, a1, a2);
          break;
        }
        case LemmaKind::BiLipschitz: {
          const double b1 = std::min(a1, 1 / C1);
          tr = verify_bilipschitz(x, kind, plane ? sine2 : sine1, C1, C2, nu, std::min(a0, b1), b1);
          break;
        }
      }
    }
    st.add(tr);
  }
  return st;
}

}  // namespace hyplab
