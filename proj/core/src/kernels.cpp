#include "hyplab/fup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hyplab {

const char* core_kind_name(CoreKind c) {
  switch (c) {
    case CoreKind::Fourier:
      return "fourier";
    case CoreKind::GeneralPhase:
      return "general";
    default:
      return "logphase";
  }
}

DenseCore general_phase_fio(const PhaseFn& phase, const AmplitudeFn& amp, const std::vector<Vec>& xs,
                            const std::vector<Vec>& ys, double h, double dy) {
  if (!(h > 0) || !(dy > 0)) throw DomainError("general_phase_fio: need h, dy > 0");
  if (xs.size() * ys.size() > (std::size_t{1} << 24)) throw DomainError("general_phase_fio: kernel too large");
  const int n = xs.empty() ? (ys.empty() ? 1 : static_cast<int>(ys[0].size())) : static_cast<int>(xs[0].size());
  const double pre = std::pow(h, -0.5 * n) * dy;
  CMat k(xs.size(), ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const Complex b = amp(xs[i], ys[j]);
      if (!std::isfinite(b.real()) || !std::isfinite(b.imag())) throw DomainError("general_phase_fio: amplitude not finite");
      k(i, j) = b == Complex(0) ? Complex(0) : pre * b * std::polar(1.0, phase(xs[i], ys[j]) / h);
    }
  return DenseCore(std::move(k));
}

std::vector<Vec> unit_grid(int N, int n) {
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= N;
  std::vector<Vec> pts(total, Vec(n));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (int i = 0; i < n; ++i) {
      pts[idx][i] = double(r % N) / N;
      r /= N;
    }
  }
  return pts;
}

std::vector<Vec> select_points(const std::vector<Vec>& pts, const std::vector<Eigen::Index>& idx) {
  std::vector<Vec> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(pts.at(i));
  return out;
}

SphereGrid sphere_grid(int n, int count) {
  if (count < 1) throw DomainError("sphere_grid: need at least one point");
  SphereGrid g;
  g.n = n;
  if (n == 1) {
    for (int j = 0; j < count; ++j) {
      Vec p(2);
      p << std::cos(2 * M_PI * j / count), std::sin(2 * M_PI * j / count);
      g.points.push_back(p);
    }
    g.weight = 2 * M_PI / count;
  } else if (n == 2) {
    const double golden = M_PI * (3 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1 - (2.0 * k + 1) / count;
      const double r = std::sqrt(1 - z * z);
      Vec p(3);
      p << r * std::cos(golden * k), r * std::sin(golden * k), z;
      g.points.push_back(p);
    }
    g.weight = 4 * M_PI / count;
  } else {
    throw DomainError("sphere_grid: only S^1 and S^2 are supported");
  }
  return g;
}

CutoffFn separated_cutoff(double d0, double d1) {
  if (!(d0 > 0 && d1 > d0)) throw DomainError("separated_cutoff: need 0 < d0 < d1");
  return [d0, d1](const Vec& a, const Vec& b) {
    const double s = std::clamp(((a - b).norm() - d0) / (d1 - d0), 0.0, 1.0);
    return s * s * s * (10 - 15 * s + 6 * s * s);
  };
}

DenseCore log_phase_kernel(double w, double h, const CutoffFn& chi, const std::vector<Vec>& ys,
                           const std::vector<Vec>& yps, int n, double dy, double diag_margin) {
  if (!(h > 0) || !(dy > 0)) throw DomainError("log_phase_kernel: need h, dy > 0");
  const double pre = std::pow(2 * M_PI * h, -0.5 * n) * dy;
  CMat k(ys.size(), yps.size());
  for (std::size_t i = 0; i < ys.size(); ++i)
    for (std::size_t j = 0; j < yps.size(); ++j) {
      const double c = chi(ys[i], yps[j]);
      const double d = (ys[i] - yps[j]).norm();
      if (c != 0 && d < diag_margin) throw DomainError("log_phase_kernel: cutoff does not vanish near the diagonal");
      k(i, j) = c == 0 ? Complex(0) : pre * c * std::polar(1.0, 2 * w / h * std::log(d / 2));
    }
  return DenseCore(std::move(k));
}

std::vector<std::uint8_t> arc_cantor_mask(const SphereGrid& g, double offset, double length, const CantorSpec& spec,
                                          int depth) {
  if (g.n != 1) throw DomainError("arc_cantor_mask: circle grids only");
  spec.validate(1);
  long cells = 1;
  for (int k = 0; k < depth; ++k) cells *= spec.base;
  std::vector<std::uint8_t> ok(spec.base, 0);
  for (int d : spec.axis_digits(0)) ok[d] = 1;
  std::vector<std::uint8_t> mask(g.points.size(), 0);
  const double count = static_cast<double>(g.points.size());
  for (std::size_t j = 0; j < g.points.size(); ++j) {
    double t = std::fmod(2 * M_PI * j / count - offset, 2 * M_PI);
    if (t < 0) t += 2 * M_PI;
    if (!(t < length)) continue;
    long c = std::clamp(static_cast<long>(std::floor(t / length * cells)), 0L, cells - 1);
    bool keep = true;
    for (int k = 0; k < depth && keep; ++k) {
      keep = ok[c % spec.base];
      c /= spec.base;
    }
    mask[j] = keep;
  }
  return mask;
}

namespace {

long ipow(long b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

BoxSet experiment_mask(const FupConfig& cfg, int depth) {
  const int N = static_cast<int>(ipow(cfg.cantor.base, depth));
  if (cfg.full_masks) return BoxSet::make_full(cfg.n, N);
  CantorSpec s = cfg.cantor;
  s.depth = depth;
  BoxSet x = cantor_generate(s, cfg.n);
  if (cfg.rho) {
    const double h = 1.0 / N;
    const long r = std::lround(N * std::pow(h, *cfg.rho));
    if (r >= 1) x = neighborhood(x, double(r) / N);
  }
  return x;
}

std::string fmt17(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

FupResult fup_experiment(const FupConfig& cfg) {
  if (cfg.depths.empty()) throw DomainError("fup_experiment: empty ladder");
  FupResult res;
  std::vector<std::pair<double, double>> samples;
  for (int depth : cfg.depths) {
    if (depth < 1) throw DomainError("fup_experiment: depths must be positive");
    FupRow row;
    row.core = cfg.core;
    row.n = cfg.n;
    row.rho = cfg.rho.value_or(0.0);
    PowerOptions po = cfg.power;
    if (cfg.core == CoreKind::LogPhase) {
      if (cfg.n != 1) throw DomainError("fup_experiment: log-phase experiments run on S^1");
      if (!(cfg.arc_length < cfg.arc_separation && cfg.arc_length + cfg.arc_separation < 2 * M_PI))
        throw DomainError("fup_experiment: arcs must be disjoint");
      const double h = 1.0 / double(ipow(cfg.cantor.base, depth));
      SphereGrid g = sphere_grid(1, cfg.sphere_points);
      auto plus = arc_cantor_mask(g, -cfg.arc_length / 2, cfg.arc_length, cfg.cantor, depth);
      auto minus = arc_cantor_mask(g, cfg.arc_separation - cfg.arc_length / 2, cfg.arc_length, cfg.cantor, depth);
      std::vector<Vec> ys, yps;
      for (std::size_t j = 0; j < g.points.size(); ++j) {
        if (minus[j]) ys.push_back(g.points[j]);
        if (plus[j]) yps.push_back(g.points[j]);
      }
      const double gap = std::min(cfg.arc_separation, 2 * M_PI - cfg.arc_separation) - cfg.arc_length;
      const double d1 = 2 * std::sin(gap / 2);
      DenseCore k = log_phase_kernel(cfg.w, h, separated_cutoff(d1 / 2, d1), ys, yps, 1, g.weight, d1 / 4);
      std::vector<Eigen::Index> li(ys.size()), ri(yps.size());
      for (std::size_t i = 0; i < li.size(); ++i) li[i] = static_cast<Eigen::Index>(i);
      for (std::size_t i = 0; i < ri.size(); ++i) ri[i] = static_cast<Eigen::Index>(i);
      MaskedOperator op(k, li, ri);
      auto est = power_norm(op, po);
      row.N = cfg.sphere_points;
      row.h = h;
      row.norm = est.norm;
      row.iters = est.iters;
      row.converged = est.converged;
      row.dense = dense_norm(k.matrix());
    } else {
      const long N = ipow(cfg.cantor.base, depth);
      if (!is_three_smooth(static_cast<int>(N))) throw DomainError("fup_experiment: unsupported N");
      BoxSet x = experiment_mask(cfg, depth);
      const auto idx = mask_indices(x);
      long total = 1;
      for (int i = 0; i < cfg.n; ++i) total *= N;
      row.N = N;
      row.h = 1.0 / N;
      if (cfg.core == CoreKind::Fourier) {
        FourierCore core(static_cast<int>(N), cfg.n);
        MaskedOperator op(core, idx, idx);
        auto est = power_norm(op, po);
        row.norm = est.norm;
        row.iters = est.iters;
        row.converged = est.converged;
        if (total <= cfg.dense_limit) row.dense = dense_norm(op);
      } else {
        const auto pts = select_points(unit_grid(static_cast<int>(N), cfg.n), idx);
        const double q = cfg.quadratic;
        DenseCore k = general_phase_fio(
            [q](const Vec& x, const Vec& y) { return -2 * M_PI * x.dot(y) + q * y.squaredNorm(); },
            [](const Vec&, const Vec&) { return Complex(1.0); }, pts, pts, 1.0 / N, 1.0 / double(total));
        std::vector<Eigen::Index> all(pts.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Eigen::Index>(i);
        MaskedOperator op(k, all, all);
        auto est = power_norm(op, po);
        row.norm = est.norm;
        row.iters = est.iters;
        row.converged = est.converged;
        if (total <= cfg.dense_limit) row.dense = dense_norm(k.matrix());
      }
      if (row.norm > 1 + 1e-10) {
        res.sanity_ok = false;
        res.messages.push_back("norm above unitarity cap at N=" + std::to_string(N));
      }
      if (cfg.lower_bound_check && !idx.empty()) {
        const double lb = std::sqrt(double(idx.size()) / double(total));
        if (row.norm < lb - 1e-12) {
          res.sanity_ok = false;
          res.messages.push_back("norm below single-column bound at N=" + std::to_string(N));
        }
      }
    }
    if (!row.converged) {
      res.sanity_ok = false;
      res.messages.push_back("power iteration hit the cap at depth " + std::to_string(depth));
    }
    if (row.dense >= 0 && std::abs(row.dense - row.norm) > 1e-6) {
      res.sanity_ok = false;
      res.messages.push_back("dense cross-check mismatch at depth " + std::to_string(depth) + ": " + fmt17(row.norm) +
                             " vs " + fmt17(row.dense));
    }
    res.rows.push_back(row);
    samples.emplace_back(row.h, row.norm);
  }
  bool positive = true;
  for (const auto& s : samples) positive = positive && s.second > 0;
  if (samples.size() >= 4 && positive) {
    res.fit = beta_fit(samples);
  } else {
    res.fit.samples = samples;
    res.messages.push_back("no decay fit: need at least 4 positive samples");
  }
  return res;
}

}  // namespace hyplab
