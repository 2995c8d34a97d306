// Acceptance runner: one line per criterion, exit 0 only if all pass.

#include "hyplab/flowbox.hpp"
#include "hyplab/fup.hpp"
#include "hyplab/lab.hpp"
#include "hyplab/lorentz.hpp"
#include "hyplab/porosity.hpp"
#include "hyplab/sphere.hpp"
#include "hyplab/stable_unstable.hpp"
#include "hyplab/words.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace hyplab;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kTableFloat = 1e-12;
constexpr double kFlow = 1e-9;
constexpr double kHorocyclic = 1e-8;
constexpr double kRate = 1e-6;
constexpr double kRecon = 1e-10;
constexpr double kSymplectic = 1e-5;
constexpr double kFoliation = 1e-6;
constexpr double kFoliationControl = 0.1;
constexpr double kTheta = 1e-8;
constexpr double kHessianRel = 1e-4;
constexpr double kUnitarity = 1e-10;
constexpr double kSingleColumn = 1e-12;
constexpr double kPowerDense = 1e-6;
constexpr double kWordSlack = 0.1;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<Outcome()> run;
};

std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

double recon_error(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

Vec sphere_point(int n, Rng& rng) {
  Vec v = random_normal(rng, n + 1);
  return v / v.norm();
}

BoxSet mid_third(int depth) {
  CantorSpec s;
  s.digits = {{0, 2}};
  s.depth = depth;
  return cantor_generate(s, 1);
}

Outcome check_commutator_table() {
  Outcome o;
  double exact = 0, flt = 0;
  int rows = 0;
  for (int n : {2, 3, 4})
    for (const auto& r : lab::commutator_suite(n, false, kTableFloat)) {
      ++rows;
      if (r.suite == "exact")
        exact = std::max(exact, r.residual);
      else
        flt = std::max(flt, r.residual);
      o.pass = o.pass && r.pass;
    }
  o.pass = o.pass && exact == 0 && flt <= kTableFloat;
  o.detail = std::to_string(rows) + " relations, exact max " + num(exact) + ", float max " + num(flt);
  return o;
}

Outcome check_flow_compatibility() {
  Rng rng(2);
  const auto f = lab::flow_compat_suite(2, 500, 5.0, kFlow, rng);
  const auto h = lab::horocyclic_suite(2, 500, 5.0, kHorocyclic, rng);
  return {f.pass && h.pass && f.residual <= kFlow && h.residual <= kHorocyclic,
          "flow vs exp " + num(f.residual) + ", horocyclic " + num(h.residual)};
}

Outcome check_expansion_rates() {
  Rng rng(3);
  double worst = 0;
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + k % 3;
    const PhasePoint p = random_phase_point(n, rng);
    const double t = uniform(rng, 0, 3);
    for (const auto& v : stable_unstable_basis(p, Bundle::Unstable))
      worst = std::max(worst, std::abs(expansion_rate(p, v, t) / std::exp(t) - 1));
    for (const auto& v : stable_unstable_basis(p, Bundle::Stable))
      worst = std::max(worst, std::abs(expansion_rate(p, v, t) / std::exp(-t) - 1));
  }
  return {worst <= kRate, "max relative error " + num(worst)};
}

Outcome check_decompositions() {
  Rng rng(4);
  double kan = 0, norm = 0;
  int disagree = 0, replaced = 0;
  for (int n : {2, 3, 4}) {
    for (int k = 0; k < 500; ++k) {
      GroupElement g = random_group_element(n, rng);
      while (!is_group_element(g.matrix())) {
        ++replaced;
        g = random_group_element(n, rng);
      }
      for (Sign s : {Sign::Plus, Sign::Minus}) {
        double err = std::numeric_limits<double>::infinity();
        try {
          const KanFactors f = kan_decompose(g, s);
          if (in_K(f.k.matrix(), 1e-8) && recon_error(f.a.matrix(), a_of(f.t, n).matrix()) <= kRecon &&
              recon_error(f.b.matrix(), b_of(f.v, s).matrix()) <= kRecon)
            err = recon_error(f.k.matrix() * f.a.matrix() * f.b.matrix(), g.matrix());
        } catch (const CertificationError&) {
        }
        kan = std::max(kan, err);
      }
    }
    const int l = 2, q = n - l + 1;
    for (int k = 0; k < 500; ++k) {
      const int det = k % 2 ? -1 : 1;
      Mat kk = Mat::Identity(n + 2, n + 2);
      kk.bottomRightCorner(q, q) = random_orthogonal(q, rng, det);
      if (det < 0) kk = k_reflection(n, l) * kk;
      const Mat g = random_standard_element(n, l, rng).matrix() * kk;
      double err = std::numeric_limits<double>::infinity();
      try {
        const NormalizerSplit sp = normalizer_decompose(GroupElement::certify(g, 1e-8), l);
        if (standard_subgroup_member(sp.w.matrix(), l, 1e-8)) err = recon_error(sp.w.matrix() * sp.k.matrix(), g);
      } catch (const std::exception&) {
      }
      norm = std::max(norm, err);
      const Mat other = random_group_element(n, rng, 3).matrix();
      for (const Mat* m : {&g, &other})
        if (normalizer_member(*m, l, 1e-8) != normalizer_member_by_conjugation(*m, l, rng, 20, 1e-6)) ++disagree;
      Mat ku = Mat::Identity(n + 2, n + 2), k0 = Mat::Identity(n + 2, n + 2);
      k0.bottomRightCorner(n, n) = random_orthogonal(n, rng, 1);
      ku.bottomRightCorner(n - 1, n - 1) = random_orthogonal(n - 1, rng, det);
      ku(2, 2) = det;
      for (const Mat* m : {&ku, &k0})
        if (ku_member(*m, 1e-8) != ku_member_by_conjugation(*m, 1e-6)) ++disagree;
    }
  }
  return {kan <= kRecon && norm <= kRecon && disagree == 0,
          "KAN " + num(kan) + ", normalizer " + num(norm) + ", predicate disagreements " + std::to_string(disagree) +
              ", uncertified draws replaced " + std::to_string(replaced)};
}

Outcome check_kappa_geometry() {
  Rng rng(5);
  double symp = 0, fol = 0, control = std::numeric_limits<double>::infinity(), theta = 0;
  for (int n : {1, 2, 3})
    for (int k = 0; k < 5; ++k) {
      const PhasePoint p = random_phase_point(n, rng, 0.8);
      for (Sign s : {Sign::Plus, Sign::Minus}) symp = std::max(symp, symplectic_exactness_check(s, p, 1e-4));
    }
  for (int k = 0; k < 10; ++k) {
    const PhasePoint p = random_phase_point(2, rng, 0.8);
    fol = std::max({fol, foliation_straightening_check(Sign::Plus, p), foliation_straightening_check(Sign::Minus, p)});
    control = std::min({control,
                        foliation_straightening_residual(Sign::Plus, p, stable_unstable_basis(p, Bundle::Stable)),
                        foliation_straightening_residual(Sign::Minus, p, stable_unstable_basis(p, Bundle::Unstable))});
    for (Sign s : {Sign::Plus, Sign::Minus})
      for (double t : {0.5, 1.0, 2.0}) {
        const auto [x, xi] = geodesic_flow(p.x, p.xi, t);
        theta = std::max(theta, std::abs(kappa({x, xi}, s).theta - (kappa(p, s).theta - t)));
      }
  }
  return {symp <= kSymplectic && fol <= kFoliation && control > kFoliationControl && theta <= kTheta,
          "symplectic " + num(symp) + ", foliation " + num(fol) + ", control " + num(control) + ", theta " +
              num(theta)};
}

Outcome check_mixed_hessian() {
  Rng rng(6);
  double worst = 0, margin = std::numeric_limits<double>::infinity();
  const ScalarPhase phi = log_phase_fn(1.0);
  for (int n : {1, 2})
    for (int k = 0; k < 100; ++k) {
      Vec y, yp;
      do {
        y = sphere_point(n, rng);
        yp = sphere_point(n, rng);
      } while ((y - yp).norm() < 0.1);
      const double fd = mixed_hessian_det(phi, y, yp);
      const double sym = log_phase_symbolic_det(1.0, y, yp);
      worst = std::max(worst, std::abs(fd - sym) / std::abs(sym));
      margin = std::min(margin, std::abs(fd));
    }
  return {worst <= kHessianRel && margin > 0, "max relative error " + num(worst) + ", min |det| " + num(margin)};
}

Outcome check_fup_fourier() {
  Outcome o;
  FupConfig cfg;
  cfg.cantor.digits = {{0, 2}};
  cfg.depths = {3, 4, 5, 6, 7, 8};
  const FupResult r = fup_experiment(cfg);
  double cap = 0, agree = 0, col = 0;
  bool monotone = true;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    cap = std::max(cap, r.rows[i].norm - 1);
    if (r.rows[i].N <= 4096) {
      if (r.rows[i].dense < 0) o.pass = false;
      agree = std::max(agree, std::abs(r.rows[i].dense - r.rows[i].norm));
    }
    if (i && r.rows[i].norm > r.rows[i - 1].norm) monotone = false;
  }
  // Single-column exactness and the two-dimensional sanity ladder.
  for (int depth = 3; depth <= 8; ++depth) {
    const BoxSet x = mid_third(depth);
    BoxSet one = BoxSet::make_empty(1, x.m);
    one.mask[x.m / 2] = 1;
    col = std::max(col, std::abs(masked_norm(x, one).norm - std::sqrt(double(x.occupied()) / x.m)));
  }
  FupConfig two = cfg;
  two.n = 2;
  two.depths = {1, 2, 3};
  const FupResult r2 = fup_experiment(two);
  for (const auto& row : r2.rows) {
    cap = std::max(cap, row.norm - 1);
    if (row.dense >= 0) agree = std::max(agree, std::abs(row.dense - row.norm));
  }
  o.pass = o.pass && r.sanity_ok && r2.sanity_ok && cap <= kUnitarity && col <= kSingleColumn &&
           agree <= kPowerDense && r.fit.beta > 0 && monotone;
  o.detail = "beta " + num(r.fit.beta) + ", cap excess " + num(cap) + ", single column " + num(col) +
             ", power vs dense " + num(agree) + (monotone ? ", nonincreasing" : ", NOT monotone");
  return o;
}

Outcome check_fup_log_phase() {
  Outcome o;
  FupConfig cfg;
  cfg.core = CoreKind::LogPhase;
  cfg.cantor = CantorSpec{5, {{0, 4}}, 1};
  cfg.depths = {1, 2, 3, 4};
  cfg.sphere_points = 4096;
  for (double w : {0.125, 1.0, 8.0}) {
    cfg.w = w;
    const FupResult r = fup_experiment(cfg);
    o.pass = o.pass && r.sanity_ok && r.fit.beta > 0;
    o.detail += (o.detail.empty() ? "" : ", ") + std::string("w=") + num(w) + " beta " + num(r.fit.beta);
  }
  return o;
}

Outcome check_lemma_verifiers() {
  Outcome o;
  LemmaSuiteOptions opt;
  opt.trials = 200;
  int total = 0, violations = 0, vacuous = 0;
  for (LemmaKind k : {LemmaKind::Affine, LemmaKind::Neighborhood, LemmaKind::BiLipschitz})
    for (PorosityKind m : {PorosityKind::Ball, PorosityKind::Line}) {
      const LemmaStats st = run_lemma_trials(k, m, opt);
      total += st.trials;
      violations += st.violations;
      vacuous += st.vacuous;
      o.pass = o.pass && st.trials == 200 && st.violations == 0;
    }
  o.detail = std::to_string(total) + " trials, " + std::to_string(violations) + " violations, " +
             std::to_string(vacuous) + " vacuous";
  return o;
}

Outcome check_word_counting() {
  Outcome o;
  const Rational alpha = parse_rational("0.04");
  int mismatches = 0;
  for (const auto& a : {alpha, Rational(1, 4), Rational(1, 2)}) {
    for (int T0 = 1; T0 <= 16; ++T0)
      if (count_uncontrolled(T0, a) != count_uncontrolled_enumerate(T0, a)) ++mismatches;
    for (int T0 = 1; T0 <= 3; ++T0)
      if (BigInt(split_XY(T0, a).X.size()) != count_X(T0, a)) ++mismatches;
  }
  std::vector<double> hs;
  for (int j = 40; j <= 60; ++j) hs.push_back(std::ldexp(1.0, -j));
  const auto rows = bound_check(0.9, alpha, hs, kWordSlack);
  const double bound = 4 * std::sqrt(to_double(alpha)) + kWordSlack;
  o.pass = mismatches == 0 && rows.back().ratio < bound;
  o.detail = "mismatches " + std::to_string(mismatches) + ", final ratio " + num(rows.back().ratio) + " < " +
             num(bound) + " (T0 " + std::to_string(rows.front().T0) + ".." + std::to_string(rows.back().T0) + ")";
  return o;
}

Outcome check_determinism() {
  const fs::path root = fs::temp_directory_path() / "hyplab-acceptance";
  fs::remove_all(root);
  using lab::json;
  const json cantor6 = {{"cantor", {{"base", 3}, {"kept_digits", {0, 2}}, {"depth", 6}}}};
  const std::vector<std::pair<std::string, json>> runs = {
      {"algebra-verify", {{"samples", 50}}},
      {"flow-trace", json::object()},
      {"group-decompose", {{"samples", 50}}},
      {"porosity-check", {{"set", cantor6}, {"nu", 0.2}}},
      {"porosity-check", {{"lemma", {{"kind", "affine"}, {"trials", 20}}}}},
      {"sphere-porosity", json::object()},
      {"fup-scan", {{"depths", {3, 4, 5, 6}}}},
      {"fio-sphere", {{"depths", {1, 2, 3}}, {"sphere_points", 1024}}},
      {"words-count", json::object()},
      {"hessian-check", {{"pairs", 20}}},
  };
  Outcome o;
  int k = 0, files = 0;
  for (const auto& [cmd, cfg] : runs) {
    lab::RunOptions opt;
    opt.seed = 7;
    opt.workers = cmd == "fio-sphere" ? 2 : 1;
    opt.out = root / ("run" + std::to_string(k++));
    const auto first = lab::execute(cmd, cfg, opt);
    const auto again = lab::rerun(opt.out / "manifest.json", opt.out.string() + "-rerun");
    files += static_cast<int>(first.manifest.at("outputs").size());
    if (!again.reproduced) {
      o.pass = false;
      o.detail += cmd + " not reproduced; ";
    }
  }
  fs::remove_all(root);
  o.detail += std::to_string(runs.size()) + " runs, " + std::to_string(files) + " output files compared";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "commutator table", 1, check_commutator_table},
      {2, "flow compatibility", 5, check_flow_compatibility},
      {3, "expansion rates", 60, check_expansion_rates},
      {4, "KAN and normalizer decompositions", 60, check_decompositions},
      {5, "kappa geometry", 60, check_kappa_geometry},
      {6, "mixed Hessian determinant", 60, check_mixed_hessian},
      {7, "masked Fourier norms", 120, check_fup_fourier},
      {8, "log-phase sphere kernel", 300, check_fup_log_phase},
      {9, "porosity lemma verifiers", 120, check_lemma_verifiers},
      {10, "word counting", 10, check_word_counting},
      {11, "determinism", 300, check_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("[%s] %2d %s: %s; %.2f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
