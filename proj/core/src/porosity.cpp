#include "hyplab/porosity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Padded {
  int n = 1;
  int m = 1;
  int P = 0;
  int L = 1;
  std::vector<int> shape;
  std::vector<std::uint8_t> occ;
  std::vector<double> d2;

  std::size_t total() const { return occ.size(); }
  std::vector<int> coords(std::size_t idx) const {
    std::vector<int> c(n);
    for (int i = 0; i < n; ++i) {
      c[i] = static_cast<int>(idx % L);
      idx /= L;
    }
    return c;
  }
  long index_of(const std::vector<int>& j) const {
    long idx = 0, stride = 1;
    for (int i = 0; i < n; ++i) {
      if (j[i] < 0 || j[i] >= L) return -1;
      idx += stride * j[i];
      stride *= L;
    }
    return idx;
  }
};

Padded make_padded(const BoxSet& x, int P) {
  Padded g;
  g.n = x.n;
  g.m = x.m;
  g.P = P;
  g.L = x.m + 2 * P;
  g.shape.assign(x.n, g.L);
  std::size_t total = 1;
  for (int i = 0; i < x.n; ++i) {
    total *= static_cast<std::size_t>(g.L);
    if (total > (std::size_t{1} << 26)) throw DomainError("porosity check: padded grid too large");
  }
  g.occ.assign(total, 0);
  for (std::size_t idx = 0; idx < x.mask.size(); ++idx) {
    if (!x.mask[idx]) continue;
    auto c = x.coords(idx);
    for (auto& v : c) v += P;
    g.occ[g.index_of(c)] = 1;
  }
  g.d2 = edt_squared(g.occ, g.shape);
  return g;
}

struct MinMax {
  double value_sq = -kInf;  // min over domain of the window maximum of d2
  long argmin = -1;
};

// One axis: windows are integer intervals, so a monotone-queue sliding maximum is exact.
MinMax window_minmax_1d(const Padded& g, double rho, bool strict, const std::vector<std::uint8_t>& domain) {
  MinMax out;
  out.value_sq = kInf;
  const long w = strict ? static_cast<long>(std::ceil(rho)) - 1 : static_cast<long>(std::floor(rho));
  const long L = g.L;
  std::vector<long> q(L);
  long head = 0, tail = 0, next = 0;
  for (long i = 0; i < L; ++i) {
    const long hi = std::min(L - 1, i + w);
    for (; next <= hi; ++next) {
      while (tail > head && g.d2[q[tail - 1]] <= g.d2[next]) --tail;
      q[tail++] = next;
    }
    while (q[head] < i - w) ++head;
    if (domain[i] && g.d2[q[head]] < out.value_sq) {
      out.value_sq = g.d2[q[head]];
      out.argmin = i;
    }
  }
  return out;
}

// min over z0 in the domain of max{d2(z) : |z - z0| < rho (strict) or <= rho}.
// Exact: bisection over the sorted distinct values of d2 with one transform per probe.
MinMax window_minmax(const Padded& g, double rho, bool strict, const std::vector<std::uint8_t>& domain) {
  MinMax out;
  bool any = false;
  for (auto d : domain) any = any || d;
  if (!any) {
    out.value_sq = kInf;
    return out;
  }
  if (rho < 0 || (strict && rho == 0)) return out;
  if (g.n == 1) return window_minmax_1d(g, rho, strict, domain);
  const double rho2 = rho * rho;
  std::vector<double> vals(g.d2.begin(), g.d2.end());
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  std::vector<std::uint8_t> mark(g.total());
  auto failing = [&](double t) -> long {
    for (std::size_t i = 0; i < mark.size(); ++i) mark[i] = g.d2[i] >= t;
    auto e = edt_squared(mark, g.shape);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (!domain[i]) continue;
      const bool inside = strict ? e[i] < rho2 : e[i] <= rho2;
      if (!inside) return static_cast<long>(i);
    }
    return -1;
  };
  std::size_t lo = 0, hi = vals.size() - 1;
  if (failing(vals[hi]) < 0) {
    lo = hi;
  } else {
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (failing(vals[mid]) < 0)
        lo = mid;
      else
        hi = mid;
    }
  }
  out.value_sq = vals[lo];
  if (lo + 1 < vals.size()) {
    out.argmin = failing(vals[lo + 1]);
  } else {
    for (std::size_t i = 0; i < domain.size(); ++i)
      if (domain[i]) {
        out.argmin = static_cast<long>(i);
        break;
      }
  }
  return out;
}

void validate_common(const BoxSet& x, double nu, double alpha0, double alpha1) {
  if (!(nu > 0 && nu <= 1)) throw DomainError("porosity check: need 0 < nu <= 1");
  if (!(alpha0 > 0 && alpha0 <= alpha1)) throw DomainError("porosity check: need 0 < alpha0 <= alpha1");
  if (x.delta() > nu * alpha0 / 4 * (1 + 1e-12))
    throw DomainError("porosity check: resolution inadequate, need delta <= nu*alpha0/4");
}

Vec physical(const Padded& g, const std::vector<int>& j) {
  Vec p(g.n);
  for (int i = 0; i < g.n; ++i) p[i] = (j[i] - g.P + 0.5) / g.m;
  return p;
}

void finish(PorosityReport& rep, const std::vector<std::optional<PorosityWitness>>& wit) {
  bool all = true;
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    auto& r = rep.rows[k];
    if (r.margin_lo >= 1)
      r.verdict = Verdict::CertifiedPorous;
    else if (r.margin_hi < 1)
      r.verdict = Verdict::CounterexampleFound;
    else
      r.verdict = Verdict::Inconclusive;
    if (r.verdict == Verdict::CounterexampleFound && !rep.witness) {
      rep.witness = wit[k];
    }
    all = all && r.verdict == Verdict::CertifiedPorous;
  }
  if (rep.witness)
    rep.verdict = Verdict::CounterexampleFound;
  else
    rep.verdict = all ? Verdict::CertifiedPorous : Verdict::Inconclusive;
}

std::vector<Vec> occupied_centers(const BoxSet& x) {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < x.mask.size(); ++i)
    if (x.mask[i]) {
      auto c = x.coords(i);
      Vec p(x.n);
      for (int k = 0; k < x.n; ++k) p[k] = c[k];
      out.push_back(p);
    }
  return out;
}

// Distance in cell units from lattice point z (unpadded cell coordinates) to the nearest occupied center.
double brute_center_distance(const std::vector<Vec>& sites, const Vec& z) {
  double best = kInf;
  for (const auto& s : sites) best = std::min(best, (s - z).squaredNorm());
  return std::sqrt(best);
}

PorosityReport ball_check_impl(const BoxSet& x, double nu, double alpha0, double alpha1, PorosityKind kind) {
  PorosityReport rep;
  rep.kind = kind;
  rep.nu = nu;
  rep.alpha0 = alpha0;
  rep.alpha1 = alpha1;
  rep.directions = kind == PorosityKind::Line ? 1 : 0;
  const auto ladder = scale_ladder(alpha0, alpha1);
  std::vector<std::optional<PorosityWitness>> wit(ladder.size());
  if (x.empty_set()) {
    for (double R : ladder) rep.rows.push_back({R, kInf, kInf, Verdict::CertifiedPorous});
    finish(rep, wit);
    return rep;
  }
  const double h = std::sqrt(double(x.n)) / 2;
  const int P = static_cast<int>(std::ceil(nu * alpha1 * x.m + h)) + 3;
  Padded g = make_padded(x, P);
  std::vector<std::uint8_t> all(g.total(), 1), inner(g.total());
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const double R = ladder[k];
    const double rc = R * x.m / 2;
    const double r = nu * R * x.m;
    auto cert = window_minmax(g, rc - h, true, all);
    const double reach = rc + h;
    for (std::size_t i = 0; i < g.total(); ++i) {
      auto j = g.coords(i);
      bool ok = true;
      for (int a = 0; a < g.n && ok; ++a) ok = j[a] - reach >= 0 && j[a] + reach <= g.L - 1;
      inner[i] = ok;
    }
    auto ce = window_minmax(g, reach, false, inner);
    ScaleRow row;
    row.R = R;
    row.margin_lo = cert.value_sq == -kInf ? 0.0 : (std::sqrt(cert.value_sq) - h) / r;
    row.margin_hi = ce.value_sq == kInf ? kInf : (std::sqrt(ce.value_sq) + h) / r;
    if (ce.argmin >= 0) wit[k] = PorosityWitness{physical(g, g.coords(ce.argmin)), Vec(), R};
    rep.rows.push_back(row);
  }
  finish(rep, wit);
  return rep;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::CertifiedPorous:
      return "CertifiedPorous";
    case Verdict::CounterexampleFound:
      return "CounterexampleFound";
    default:
      return "Inconclusive";
  }
}

const char* porosity_kind_name(PorosityKind k) { return k == PorosityKind::Ball ? "ball" : "line"; }

double PorosityReport::min_margin() const {
  double m = kInf;
  for (const auto& r : rows) m = std::min(m, r.margin_lo);
  return m;
}

std::vector<double> scale_ladder(double alpha0, double alpha1) {
  if (!(alpha0 > 0 && alpha0 <= alpha1)) throw DomainError("scale_ladder: need 0 < alpha0 <= alpha1");
  std::vector<double> out;
  for (int k = 0;; ++k) {
    double R = alpha0 * std::pow(2.0, 0.5 * k);
    if (R > alpha1 * (1 + 1e-12)) break;
    out.push_back(R);
  }
  if (out.back() < alpha1 * (1 - 1e-12)) out.push_back(alpha1);
  return out;
}

PorosityReport ball_porosity_check(const BoxSet& x, double nu, double alpha0, double alpha1) {
  validate_common(x, nu, alpha0, alpha1);
  return ball_check_impl(x, nu, alpha0, alpha1, PorosityKind::Ball);
}

std::vector<Vec> line_directions(int n, int count) {
  std::vector<Vec> dirs;
  if (n == 1) {
    dirs.push_back(Vec::Ones(1));
    return dirs;
  }
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = M_PI * k / count;
      Vec v(2);
      v << std::cos(a), std::sin(a);
      dirs.push_back(v);
    }
    return dirs;
  }
  for (int i = 0; i < n; ++i) dirs.push_back(Vec::Unit(n, i));
  // Fibonacci lattice on the upper hemisphere of S^2.
  const double golden = M_PI * (3 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1 - (k + 0.5) / count;
    const double rad = std::sqrt(1 - z * z);
    Vec v(3);
    v << rad * std::cos(golden * k), rad * std::sin(golden * k), z;
    dirs.push_back(v);
  }
  return dirs;
}

PorosityReport line_porosity_check(const BoxSet& x, double nu, double alpha0, double alpha1, int directions) {
  validate_common(x, nu, alpha0, alpha1);
  if (directions < 2 * x.n) throw DomainError("line_porosity_check: need at least 2n directions");
  // In one dimension a segment of length R is the closure of a ball of diameter R.
  if (x.n == 1) return ball_check_impl(x, nu, alpha0, alpha1, PorosityKind::Line);

  PorosityReport rep;
  rep.kind = PorosityKind::Line;
  rep.nu = nu;
  rep.alpha0 = alpha0;
  rep.alpha1 = alpha1;
  const auto dirs = line_directions(x.n, directions);
  rep.directions = static_cast<int>(dirs.size());
  const auto ladder = scale_ladder(alpha0, alpha1);
  std::vector<std::optional<PorosityWitness>> wit(ladder.size());
  if (x.empty_set()) {
    for (double R : ladder) rep.rows.push_back({R, kInf, kInf, Verdict::CertifiedPorous});
    finish(rep, wit);
    return rep;
  }
  const int n = x.n;
  const double h = std::sqrt(double(n)) / 2;
  const int P = static_cast<int>(std::ceil(nu * alpha1 * line_anchor_factor(n) * x.m + 2 * h)) + 3;
  Padded g = make_padded(x, P);
  const double delta = x.delta();
  const double span_lo = -P * delta, span_hi = 1 + P * delta;
  std::vector<double> dvals(g.total());
  for (std::size_t i = 0; i < g.total(); ++i) dvals[i] = std::sqrt(g.d2[i]);

  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const double R = ladder[k];
    const double r = nu * R / delta;
    const double eta = nu * R / 4;
    const double eta_c = eta / delta;
    const int per_axis = static_cast<int>(std::ceil((span_hi - span_lo) / eta)) + 1;
    const int steps = static_cast<int>(std::ceil(R / (delta / 2)));
    double worst_lo = kInf, worst_hi = kInf;
    std::optional<PorosityWitness> w;
    std::vector<int> a(n, 0), j(n);
    Vec anchor(n), s(n);
    while (true) {
      for (int i = 0; i < n; ++i) anchor[i] = span_lo + a[i] * eta;
      for (const auto& v : dirs) {
        double best_lo = -kInf, best_hi = -kInf;
        bool outside = false;
        for (int st = 0; st <= steps; ++st) {
          const double t = std::min(st * delta / 2, R);
          s = anchor + t * v;
          for (int i = 0; i < n; ++i) j[i] = static_cast<int>(std::floor(s[i] / delta)) + P;
          long idx = g.index_of(j);
          if (idx < 0) {
            outside = true;
            continue;
          }
          const double d = dvals[idx];
          best_lo = std::max(best_lo, d - 2 * h);
          best_hi = std::max(best_hi, d + h + 0.25);
        }
        const double lo = outside ? kInf : (best_lo - eta_c * h) / r;
        worst_lo = std::min(worst_lo, lo);
        if (!outside) {
          const double hi = best_hi / r;
          if (hi < worst_hi) {
            worst_hi = hi;
            w = PorosityWitness{anchor, v, R};
          }
        }
      }
      int ax = 0;
      while (ax < n && ++a[ax] >= per_axis) {
        a[ax] = 0;
        ++ax;
      }
      if (ax == n) break;
    }
    rep.rows.push_back({R, worst_lo, worst_hi, Verdict::Inconclusive});
    wit[k] = w;
  }
  finish(rep, wit);
  return rep;
}

bool reverify_witness(const BoxSet& x, const PorosityReport& report) {
  if (!report.witness) return false;
  const auto& w = *report.witness;
  const auto sites = occupied_centers(x);
  if (sites.empty()) return false;
  const int n = x.n;
  const double h = std::sqrt(double(n)) / 2;
  const double r = report.nu * w.R * x.m;
  if (report.kind == PorosityKind::Line && w.direction.size() == n) {
    const int steps = static_cast<int>(std::ceil(w.R / (x.delta() / 2)));
    for (int st = 0; st <= steps; ++st) {
      const double t = std::min(st * x.delta() / 2, w.R);
      Vec s = w.point + t * w.direction;
      Vec z(n);
      for (int i = 0; i < n; ++i) z[i] = std::floor(s[i] * x.m);
      if (brute_center_distance(sites, z) + h + 0.25 >= r) return false;
    }
    return true;
  }
  // Ball (or one-dimensional segment) witness: every lattice point within rc + h of the center.
  const double rc = w.R * x.m / 2;
  const double reach = rc + h;
  Vec c = w.point * x.m - Vec::Constant(n, 0.5);
  std::vector<int> lo(n), hi(n), z(n);
  for (int i = 0; i < n; ++i) {
    lo[i] = static_cast<int>(std::floor(c[i] - reach));
    hi[i] = static_cast<int>(std::ceil(c[i] + reach));
  }
  z = lo;
  Vec zv(n);
  while (true) {
    for (int i = 0; i < n; ++i) zv[i] = z[i];
    if ((zv - c).norm() <= reach && brute_center_distance(sites, zv) + h >= r) return false;
    int ax = 0;
    while (ax < n && ++z[ax] > hi[ax]) {
      z[ax] = lo[ax];
      ++ax;
    }
    if (ax == n) break;
  }
  return true;
}

}  // namespace hyplab
