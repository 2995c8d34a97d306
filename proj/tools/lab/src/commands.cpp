#include "hyplab/flowbox.hpp"
#include "hyplab/fup.hpp"
#include "hyplab/lab.hpp"
#include "hyplab/lorentz.hpp"
#include "hyplab/porosity.hpp"
#include "hyplab/sphere.hpp"
#include "hyplab/stable_unstable.hpp"
#include "hyplab/words.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>

namespace hyplab::lab {

namespace {

int get_int(const json& c, const char* k) {
  if (!c.at(k).is_number_integer()) throw UsageError(std::string("field '") + k + "': expected an integer");
  return c.at(k).get<int>();
}
double get_num(const json& c, const char* k) { return c.at(k).get<double>(); }

void require(bool ok, const std::string& msg) {
  if (!ok) throw UsageError(msg);
}


PorosityKind parse_mode(const std::string& s) {
  if (s == "ball") return PorosityKind::Ball;
  if (s == "line") return PorosityKind::Line;
  throw UsageError("mode must be ball or line, got '" + s + "'");
}

std::vector<std::vector<int>> parse_digits(const json& d) {
  std::vector<std::vector<int>> out;
  require(d.is_array() && !d.empty(), "kept_digits: expected a non-empty array");
  if (d[0].is_array()) {
    for (const auto& a : d) out.push_back(a.get<std::vector<int>>());
  } else {
    out.push_back(d.get<std::vector<int>>());
  }
  return out;
}

CantorSpec parse_cantor(const json& c, int depth_default = 1) {
  CantorSpec s;
  s.base = c.value("base", 3);
  s.digits = parse_digits(c.at("kept_digits"));
  s.depth = c.value("depth", depth_default);
  return s;
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::CertifiedPorous:
      return kPass;
    case Verdict::CounterexampleFound:
      return kCounterexample;
    default:
      return kInconclusive;
  }
}

void suite_rows_csv(Csv& csv, const SuiteRow& r) {
  csv.cell(r.n).cell(r.suite).cell(r.name).cell(r.residual).cell(r.tol).cell(r.pass);
  csv.end_row();
}

// ---------------------------------------------------------------- algebra-verify

CommandOutput cmd_algebra_verify(const json& c, const RunOptions& opt) {
  const int n0 = get_int(c, "n_min"), n1 = get_int(c, "n_max");
  require(1 <= n0 && n0 <= n1 && n1 <= 16, "n range must satisfy 1 <= n_min <= n_max <= 16");
  const int samples = get_int(c, "samples");
  require(samples >= 0, "samples must be nonnegative");
  Rng rng(opt.seed);
  Csv csv({"n", "suite", "relation", "residual", "tol", "pass"});
  CommandOutput out;
  int failed = 0;
  for (int n = n0; n <= n1; ++n) {
    auto rows = commutator_suite(n, c.at("inject_sign_flip").get<bool>(), get_num(c, "tol_table"));
    rows.push_back(flow_compat_suite(n, samples, get_num(c, "t_max"), get_num(c, "tol_flow"), rng));
    rows.push_back(horocyclic_suite(n, samples, get_num(c, "t_max"), get_num(c, "tol_horocyclic"), rng));
    for (const auto& r : rows) {
      suite_rows_csv(csv, r);
      if (!r.pass) {
        ++failed;
        if (failed <= 10) out.summary.push_back("FAIL n=" + std::to_string(n) + " " + r.suite + " " + r.name);
      }
    }
  }
  out.summary.push_back(std::to_string(failed) + " failing relations");
  out.exit_code = failed ? kCounterexample : kPass;
  out.files.emplace_back("algebra.csv", csv.str());
  return out;
}

// ---------------------------------------------------------------- flow-trace

CommandOutput cmd_flow_trace(const json& c, const RunOptions& opt) {
  const int n = get_int(c, "n");
  check_dimension(n);
  const int steps = get_int(c, "steps");
  require(steps >= 1, "steps must be positive");
  const double tmax = get_num(c, "t_max");
  Rng rng(opt.seed);
  const GroupElement g = random_group_element(n, rng, 3, get_num(c, "spread"));
  const PhasePoint p = phase_point_from_frame(g.matrix());
  const KappaPoint kp = kappa(p, Sign::Plus), km = kappa(p, Sign::Minus);
  const auto eu = stable_unstable_basis(p, Bundle::Unstable);
  const auto es = stable_unstable_basis(p, Bundle::Stable);
  std::vector<std::string> head{"t"};
  for (int i = 0; i < n + 2; ++i) head.push_back("x" + std::to_string(i));
  for (int i = 0; i < n + 2; ++i) head.push_back("xi" + std::to_string(i));
  for (const char* h : {"flow_residual", "theta_plus", "theta_minus", "theta_residual", "rate_u_relerr", "rate_s_relerr"})
    head.push_back(h);
  Csv csv(head);
  double worst_flow = 0, worst_theta = 0, worst_rate = 0;
  const Mat X = gen_X(n).m;
  for (int k = 0; k <= steps; ++k) {
    const double t = -tmax + 2 * tmax * k / steps;
    const auto [x, xi] = geodesic_flow(p.x, p.xi, t);
    const auto [x2, xi2] = frame_projection(g.matrix() * exp_general(t * X));
    const double scale = std::max({1.0, x.cwiseAbs().maxCoeff(), xi.cwiseAbs().maxCoeff()});
    const double fr = std::max((x - x2).cwiseAbs().maxCoeff(), (xi - xi2).cwiseAbs().maxCoeff()) / scale;
    const PhasePoint q{x, xi};
    const double tp = kappa(q, Sign::Plus).theta, tm = kappa(q, Sign::Minus).theta;
    const double th = std::max(std::abs(tp - (kp.theta - t)), std::abs(tm - (km.theta - t)));
    double ru = 0, rs = 0;
    for (const auto& v : eu) ru = std::max(ru, std::abs(expansion_rate(p, v, t) / std::exp(t) - 1));
    for (const auto& v : es) rs = std::max(rs, std::abs(expansion_rate(p, v, t) / std::exp(-t) - 1));
    csv.cell(t);
    for (int i = 0; i < n + 2; ++i) csv.cell(x[i]);
    for (int i = 0; i < n + 2; ++i) csv.cell(xi[i]);
    csv.cell(fr).cell(tp).cell(tm).cell(th).cell(ru).cell(rs);
    csv.end_row();
    worst_flow = std::max(worst_flow, fr);
    worst_theta = std::max(worst_theta, th);
    worst_rate = std::max({worst_rate, ru, rs});
  }
  CommandOutput out;
  const bool ok = worst_flow <= get_num(c, "tol_flow") && worst_theta <= get_num(c, "tol_theta") &&
                  worst_rate <= get_num(c, "tol_rate");
  out.summary.push_back("max flow residual " + fmt17(worst_flow));
  out.summary.push_back("max theta-translation residual " + fmt17(worst_theta));
  out.summary.push_back("max expansion-rate relative error " + fmt17(worst_rate));
  out.exit_code = ok ? kPass : kCounterexample;
  out.files.emplace_back("flow_trace.csv", csv.str());
  return out;
}

// ---------------------------------------------------------------- group-decompose

double recon_error(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

CommandOutput cmd_group_decompose(const json& c, const RunOptions& opt) {
  const int n = get_int(c, "n");
  check_dimension(n);
  const int l = get_int(c, "l");
  require(2 <= l && l <= n, "l must satisfy 2 <= l <= n");
  const int samples = get_int(c, "samples");
  const double scale = get_num(c, "scale");
  const double tol = get_num(c, "tol_recon");
  const int conj = get_int(c, "conjugation_samples");
  Rng rng(opt.seed);
  Csv csv({"kind", "index", "detail", "error"});
  double worst_kan = 0, worst_norm = 0;
  int kan_fail = 0, norm_fail = 0, disagree = 0;
  int rejected = 0;
  for (int k = 0; k < samples; ++k) {
    // Inputs must pass group certification at the default tolerance; long products occasionally do not.
    GroupElement g = random_group_element(n, rng, 5, scale);
    while (!is_group_element(g.matrix())) {
      ++rejected;
      g = random_group_element(n, rng, 5, scale);
    }
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      double err;
      try {
        const KanFactors f = kan_decompose(g, s);
        err = recon_error(f.k.matrix() * f.a.matrix() * f.b.matrix(), g.matrix());
      } catch (const CertificationError&) {
        err = std::numeric_limits<double>::infinity();
      }
      worst_kan = std::max(worst_kan, err);
      if (!(err <= tol)) ++kan_fail;
      csv.cell(std::string("kan") + sign_name(s)).cell(k).cell("").cell(err);
      csv.end_row();
    }
  }
  const int q = n - l + 1;
  for (int k = 0; k < samples; ++k) {
    const int det = uniform(rng, 0, 1) < 0.5 ? 1 : -1;
    Mat kk = Mat::Identity(n + 2, n + 2);
    kk.bottomRightCorner(q, q) = random_orthogonal(q, rng, det);
    if (det < 0) kk = k_reflection(n, l) * kk;
    const Mat g = random_standard_element(n, l, rng, scale).matrix() * kk;
    double err;
    std::string kind;
    try {
      const NormalizerSplit sp = normalizer_decompose(GroupElement::certify(g, 1e-8), l);
      err = recon_error(sp.w.matrix() * sp.k.matrix(), g);
      kind = sp.kind == NormalizerKind::Centralizing ? "centralizing" : "flipped";
    } catch (const std::exception&) {
      err = std::numeric_limits<double>::infinity();
      kind = "failed";
    }
    worst_norm = std::max(worst_norm, err);
    if (!(err <= tol)) ++norm_fail;
    csv.cell("normalizer").cell(k).cell(kind).cell(err);
    csv.end_row();
    // Block predicate against conjugation, on the member and on a generic element.
    const Mat other = random_group_element(n, rng, 3, scale).matrix();
    for (const Mat* m : {&g, &other}) {
      const bool a = normalizer_member(*m, l, 1e-8);
      const bool b = normalizer_member_by_conjugation(*m, l, rng, conj, 1e-6);
      if (a != b) ++disagree;
      csv.cell("predicate_normalizer").cell(k).cell(std::string(a ? "1" : "0") + "/" + (b ? "1" : "0")).cell(a == b ? 0.0 : 1.0);
      csv.end_row();
    }
    // K_U predicate: members diag(1, 1, +-1, Q') and generic elements of K_0.
    Mat ku = Mat::Identity(n + 2, n + 2), k0 = Mat::Identity(n + 2, n + 2);
    k0.bottomRightCorner(n, n) = random_orthogonal(n, rng, 1);
    const int sgn = uniform(rng, 0, 1) < 0.5 ? 1 : -1;
    if (n >= 2) {
      ku.bottomRightCorner(n - 1, n - 1) = random_orthogonal(n - 1, rng, sgn);
      ku(2, 2) = sgn;
    }
    for (const Mat* m : {&ku, &k0}) {
      const bool a = ku_member(*m, 1e-8);
      const bool b = ku_member_by_conjugation(*m, 1e-6);
      if (a != b) ++disagree;
      csv.cell("predicate_ku").cell(k).cell(std::string(a ? "1" : "0") + "/" + (b ? "1" : "0")).cell(a == b ? 0.0 : 1.0);
      csv.end_row();
    }
  }
  CommandOutput out;
  out.summary.push_back("KAN max reconstruction error " + fmt17(worst_kan) + ", failures " + std::to_string(kan_fail) +
                        " (" + std::to_string(rejected) + " uncertified draws replaced)");
  out.summary.push_back("normalizer max reconstruction error " + fmt17(worst_norm) + ", failures " +
                        std::to_string(norm_fail));
  out.summary.push_back("predicate disagreements " + std::to_string(disagree));
  out.exit_code = kan_fail || norm_fail || disagree ? kCounterexample : kPass;
  out.files.emplace_back("group_decompose.csv", csv.str());
  return out;
}

// ---------------------------------------------------------------- porosity-check

void report_csv(Csv& csv, const PorosityReport& r, const std::string& chart) {
  for (const auto& row : r.rows) {
    if (!chart.empty()) csv.cell(chart);
    csv.cell(row.R).cell(row.margin_lo).cell(row.margin_hi).cell(verdict_name(row.verdict));
    csv.end_row();
  }
}

std::string witness_line(const PorosityReport& r) {
  if (!r.witness) return "witness none";
  std::string s = "witness R=" + fmt17(r.witness->R) + " point=";
  for (int i = 0; i < r.witness->point.size(); ++i) s += (i ? ";" : "") + fmt17(r.witness->point[i]);
  if (r.witness->direction.size()) {
    s += " direction=";
    for (int i = 0; i < r.witness->direction.size(); ++i) s += (i ? ";" : "") + fmt17(r.witness->direction[i]);
  }
  return s;
}

CommandOutput cmd_porosity_check(const json& c, const RunOptions& opt) {
  CommandOutput out;
  if (!c.at("lemma").is_null()) {
    const json& lc = c.at("lemma");
    const std::string kind = lc.value("kind", "affine");
    LemmaKind lk;
    if (kind == "affine")
      lk = LemmaKind::Affine;
    else if (kind == "neighborhood")
      lk = LemmaKind::Neighborhood;
    else if (kind == "bilipschitz")
      lk = LemmaKind::BiLipschitz;
    else
      throw UsageError("lemma.kind must be affine, neighborhood or bilipschitz");
    std::vector<PorosityKind> modes;
    const std::string mode = lc.value("mode", "both");
    if (mode == "both")
      modes = {PorosityKind::Ball, PorosityKind::Line};
    else
      modes = {parse_mode(mode)};
    LemmaSuiteOptions lo;
    lo.trials = lc.value("trials", 200);
    lo.seed = opt.seed;
    Csv csv({"lemma", "mode", "trials", "vacuous", "violations"});
    bool viol = false, thin = false;
    for (auto m : modes) {
      const LemmaStats st = run_lemma_trials(lk, m, lo);
      csv.cell(lemma_kind_name(lk)).cell(porosity_kind_name(m)).cell(st.trials).cell(st.vacuous).cell(st.violations);
      csv.end_row();
      viol = viol || st.violations > 0;
      thin = thin || 2 * (st.trials - st.vacuous) < st.trials;
      out.summary.push_back(st.name + ": " + std::to_string(st.violations) + " violations in " +
                            std::to_string(st.trials) + " trials (" + std::to_string(st.vacuous) + " vacuous)");
    }
    out.exit_code = viol ? kCounterexample : thin ? kInconclusive : kPass;
    out.files.emplace_back("lemma_trials.csv", csv.str());
    return out;
  }
  require(!c.at("set").is_null(), "porosity-check needs a set spec (positional file or 'set' field)");
  const BoxSet x = boxset_from_json(c.at("set"));
  const PorosityKind kind = parse_mode(c.at("mode").get<std::string>());
  const double nu = get_num(c, "nu"), a0 = get_num(c, "alpha0"), a1 = get_num(c, "alpha1");
  const PorosityReport r = kind == PorosityKind::Ball
                               ? ball_porosity_check(x, nu, a0, a1)
                               : line_porosity_check(x, nu, a0, a1, get_int(c, "directions"));
  Csv csv({"R", "margin_lo", "margin_hi", "verdict"});
  report_csv(csv, r, "");
  csv.footer(std::string("kind ") + porosity_kind_name(r.kind) + " nu " + fmt17(nu) + " directions " +
             std::to_string(r.directions));
  csv.footer(std::string("verdict ") + verdict_name(r.verdict));
  csv.footer(witness_line(r));
  if (r.verdict == Verdict::CounterexampleFound && c.at("reverify").get<bool>()) {
    if (!reverify_witness(x, r)) throw CertificationError("porosity-check: witness failed re-verification");
    csv.footer("witness reverified");
  }
  out.summary.push_back(std::string("verdict ") + verdict_name(r.verdict) + ", min margin " + fmt17(r.min_margin()));
  out.exit_code = verdict_exit(r.verdict);
  out.files.emplace_back("porosity.csv", csv.str());
  return out;
}

// ---------------------------------------------------------------- sphere-porosity

CapUnion sphere_set(const json& s, int n) {
  const std::string type = s.at("type").get<std::string>();
  if (type == "empty") {
    CapUnion u;
    u.n = n;
    return u;
  }
  if (type == "full") {
    CapUnion u;
    u.n = n;
    u.full = true;
    return u;
  }
  CantorSpec cs;
  cs.base = s.at("base").get<int>();
  cs.digits = parse_digits(s.at("kept_digits"));
  const int depth = s.at("depth").get<int>();
  if (type == "cantor_arc") {
    require(n == 1, "cantor_arc sets live on S^1");
    return cantor_arc_set(cs, depth, s.at("offset").get<double>(), s.at("length").get<double>());
  }
  if (type == "cantor_band") {
    require(n == 2, "cantor_band sets live on S^2");
    return cantor_band_set(cs, depth, s.at("offset").get<double>(), s.at("length").get<double>(),
                           s.at("halfwidth").get<double>());
  }
  throw UsageError("set.type must be empty, full, cantor_arc or cantor_band");
}

CommandOutput cmd_sphere_porosity(const json& c, const RunOptions&) {
  const int n = get_int(c, "n");
  require(n == 1 || n == 2, "n must be 1 or 2");
  const json& s = c.at("set");
  const double nu = get_num(c, "nu"), a0 = get_num(c, "alpha0"), a1 = get_num(c, "alpha1");
  const int m = get_int(c, "m");
  CommandOutput out;
  Csv csv({"chart", "R", "margin_lo", "margin_hi", "verdict"});
  SpherePorosityReport rep;
  if (c.at("mapped").get<bool>()) {
    require(n == 1 && s.at("type") == "cantor_arc", "mapped transfer check needs a cantor_arc set on S^1");
    CantorSpec cs;
    cs.base = s.at("base").get<int>();
    cs.digits = parse_digits(s.at("kept_digits"));
    const auto mp = verify_mapped_porosity_s1(cs, s.at("depth").get<int>(), s.at("offset").get<double>(),
                                              s.at("length").get<double>(), nu, a0, a1, m);
    rep = mp.charts;
    csv.footer("angle-space hypothesis " + std::string(mp.hypothesis ? "certified" : "not certified"));
    csv.footer("C2 " + fmt17(mp.C2) + " chart nu " + fmt17(mp.nu_chart));
    csv.footer(std::string("transfer ") + (mp.holds ? "holds" : "fails"));
    out.exit_code = !mp.hypothesis ? kInconclusive : mp.holds ? kPass : kCounterexample;
    out.summary.push_back(std::string("transfer at nu/(2 C2) less slack: ") +
                          (!mp.hypothesis ? "hypothesis not certified" : mp.holds ? "holds" : "FAILS"));
  } else {
    const ChartAtlas atlas = gnomonic_atlas(n);
    rep = sphere_porosity_check(sphere_set(s, n), atlas, parse_mode(c.at("mode").get<std::string>()), nu, a0, a1, m,
                                get_int(c, "directions"));
    out.exit_code = verdict_exit(rep.verdict);
  }
  for (std::size_t i = 0; i < rep.charts.size(); ++i) report_csv(csv, rep.charts[i], std::to_string(rep.chart_ids[i]));
  csv.footer(std::string("verdict ") + verdict_name(rep.verdict) + " charts " + std::to_string(rep.charts.size()));
  out.summary.push_back(std::string("verdict ") + verdict_name(rep.verdict) + " over " +
                        std::to_string(rep.charts.size()) + " charts meeting the set");
  out.files.emplace_back("sphere_porosity.csv", csv.str());
  return out;
}

// ---------------------------------------------------------------- fup-scan / fio-sphere

PowerOptions power_from(const json& p, std::uint64_t seed) {
  PowerOptions po;
  po.tol = p.at("tol").get<double>();
  po.max_iter = p.at("max_iter").get<int>();
  po.restarts = p.at("restarts").get<int>();
  po.seed = seed;
  return po;
}

CoreKind parse_core(const std::string& s) {
  if (s == "fourier") return CoreKind::Fourier;
  if (s == "general") return CoreKind::GeneralPhase;
  if (s == "logphase") return CoreKind::LogPhase;
  throw UsageError("core must be fourier, general or logphase, got '" + s + "'");
}

void fit_footer(Csv& csv, const FupResult& r, const std::string& tag) {
  if (r.fit.samples.size() >= 4 && r.fit.beta != 0.0) {
    csv.footer(tag + "fit beta " + fmt17(r.fit.beta) + " intercept " + fmt17(r.fit.intercept) + " residual " +
               fmt17(r.fit.residual) + " h_span " + fmt17(r.fit.samples.back().first) + " " +
               fmt17(r.fit.samples.front().first));
  } else if (r.fit.samples.size() >= 4) {
    csv.footer(tag + "fit beta " + fmt17(r.fit.beta) + " residual " + fmt17(r.fit.residual));
  } else {
    csv.footer(tag + "no fit");
  }
}

CommandOutput cmd_fup_scan(const json& c, const RunOptions& opt) {
  FupConfig f;
  f.core = parse_core(c.at("core").get<std::string>());
  f.n = get_int(c, "n");
  require(f.n >= 1 && f.n <= 3, "n must lie in 1..3");
  f.full_masks = c.at("full_masks").get<bool>();
  f.cantor = parse_cantor(c.at("cantor"));
  f.depths = c.at("depths").get<std::vector<int>>();
  if (!c.at("rho").is_null()) f.rho = get_num(c, "rho");
  f.lower_bound_check = c.at("lower_bound_check").get<bool>();
  f.quadratic = get_num(c, "quadratic");
  f.w = get_num(c, "w");
  f.sphere_points = get_int(c, "sphere_points");
  f.arc_length = get_num(c, "arc_length");
  f.arc_separation = get_num(c, "arc_separation");
  f.dense_limit = get_int(c, "dense_limit");
  f.power = power_from(c.at("power"), opt.seed);
  const FupResult r = fup_experiment(f);
  Csv csv({"core", "n", "N", "h", "rho", "norm", "iters", "converged"});
  for (const auto& row : r.rows) {
    csv.cell(core_kind_name(row.core)).cell(row.n).cell(static_cast<long long>(row.N)).cell(row.h).cell(row.rho);
    csv.cell(row.norm).cell(row.iters).cell(row.converged);
    csv.end_row();
  }
  for (const auto& row : r.rows)
    if (row.dense >= 0) csv.footer("dense N " + std::to_string(row.N) + " " + fmt17(row.dense));
  fit_footer(csv, r, "");
  for (const auto& m : r.messages) csv.footer("note " + m);
  CommandOutput out;
  out.summary.push_back(std::string("sanity ") + (r.sanity_ok ? "ok" : "FAILED") + ", beta " + fmt17(r.fit.beta));
  for (const auto& m : r.messages) out.summary.push_back(m);
  out.exit_code = r.sanity_ok ? kPass : kCounterexample;
  out.files.emplace_back("fup.csv", csv.str());
  return out;
}

CommandOutput cmd_fio_sphere(const json& c, const RunOptions& opt) {
  const auto ws = c.at("ws").get<std::vector<double>>();
  require(!ws.empty(), "ws must be non-empty");
  FupConfig base;
  base.core = CoreKind::LogPhase;
  base.n = 1;
  base.cantor = parse_cantor(c.at("cantor"));
  base.depths = c.at("depths").get<std::vector<int>>();
  base.sphere_points = get_int(c, "sphere_points");
  base.arc_length = get_num(c, "arc_length");
  base.arc_separation = get_num(c, "arc_separation");
  base.power = power_from(c.at("power"), opt.seed);
  // Independent w values run concurrently; results are collected in input order.
  std::vector<FupResult> results(ws.size());
  const std::size_t workers = static_cast<std::size_t>(std::max(1, opt.workers));
  for (std::size_t start = 0; start < ws.size(); start += workers) {
    std::vector<std::future<FupResult>> jobs;
    for (std::size_t i = start; i < std::min(ws.size(), start + workers); ++i) {
      FupConfig f = base;
      f.w = ws[i];
      jobs.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                [f] { return fup_experiment(f); }));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) results[start + i] = jobs[i].get();
  }
  Csv csv({"w", "N", "h", "norm", "iters", "converged", "dense"});
  CommandOutput out;
  bool ok = true;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const auto& r = results[i];
    for (const auto& row : r.rows) {
      csv.cell(ws[i]).cell(static_cast<long long>(row.N)).cell(row.h).cell(row.norm).cell(row.iters);
      csv.cell(row.converged).cell(row.dense);
      csv.end_row();
    }
    fit_footer(csv, r, "w " + fmt17(ws[i]) + " ");
    const bool good = r.sanity_ok && r.fit.samples.size() >= 4 && r.fit.beta > 0;
    ok = ok && good;
    out.summary.push_back("w " + fmt17(ws[i]) + ": beta " + fmt17(r.fit.beta) + (good ? "" : " (FAILED)"));
  }
  out.exit_code = ok ? kPass : kCounterexample;
  out.files.emplace_back("fio_sphere.csv", csv.str());
  return out;
}

// ---------------------------------------------------------------- words-count

CommandOutput cmd_words_count(const json& c, const RunOptions&) {
  Rational alpha;
  if (c.at("alpha").is_string())
    alpha = parse_rational(c.at("alpha").get<std::string>());
  else
    throw UsageError("field 'alpha': expected a decimal or fraction string");
  const double rho = get_num(c, "rho");
  std::vector<double> hs;
  std::vector<int> js;
  if (!c.at("h").is_null()) {
    hs = c.at("h").get<std::vector<double>>();
  } else {
    const int j0 = get_int(c, "j_min"), j1 = get_int(c, "j_max");
    require(1 <= j0 && j0 <= j1 && j1 <= 1000, "j range must satisfy 1 <= j_min <= j_max <= 1000");
    for (int j = j0; j <= j1; ++j) {
      js.push_back(j);
      hs.push_back(std::ldexp(1.0, -j));
    }
  }
  const auto rows = bound_check(rho, alpha, hs, get_num(c, "slack"));
  Csv csv({"j", "h", "T0", "count", "ratio", "logC", "within", "enumeration"});
  bool enum_ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::string check = "na";
    if (c.at("verify_enumeration").get<bool>() && r.T0 <= 16) {
      const bool eq = count_uncontrolled(r.T0, alpha) == count_uncontrolled_enumerate(r.T0, alpha);
      enum_ok = enum_ok && eq;
      check = eq ? "equal" : "MISMATCH";
    }
    csv.cell(js.empty() ? std::string("") : std::to_string(js[i])).cell(r.h).cell(r.T0).cell(r.count.str());
    csv.cell(r.ratio).cell(r.logC).cell(r.within).cell(check);
    csv.end_row();
  }
  const double bound = 4 * std::sqrt(to_double(alpha)) + get_num(c, "slack");
  csv.footer("bound 4 sqrt(alpha) + slack = " + fmt17(bound));
  if (rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(rows.size());
    for (const auto& r : rows) {
      const double x = std::log(1 / r.h), y = log_big(r.count);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double den = k * sxx - sx * sx;
    if (den > 0) csv.footer("fit slope " + fmt17((k * sxy - sx * sy) / den));
  }
  CommandOutput out;
  const bool final_within = rows.empty() ? true : rows.back().within;
  out.summary.push_back("final ratio " + fmt17(rows.empty() ? 0.0 : rows.back().ratio) + " vs bound " + fmt17(bound));
  if (!enum_ok) out.summary.push_back("formula and enumeration DISAGREE");
  out.exit_code = final_within && enum_ok ? kPass : kCounterexample;
  out.files.emplace_back("words.csv", csv.str());
  return out;
}

// ---------------------------------------------------------------- hessian-check

Vec random_sphere_point(int n, Rng& rng) {
  Vec v = random_normal(rng, n + 1);
  return v / v.norm();
}

CommandOutput cmd_hessian_check(const json& c, const RunOptions& opt) {
  const auto ns = c.at("ns").get<std::vector<int>>();
  const int pairs = get_int(c, "pairs");
  const double w = get_num(c, "w"), sep = get_num(c, "min_separation"), step = get_num(c, "fd_step");
  const double tol = get_num(c, "tol_rel"), tol_lemma = get_num(c, "tol_lemma");
  require(w > 0, "w must be positive");
  require(step == 0 || (step >= 1e-6 && step <= 1e-3), "fd_step must be 0 (automatic) or lie in [1e-6, 1e-3]");
  Rng rng(opt.seed);
  Csv csv({"n", "index", "separation", "det_fd", "det_symbolic", "rel_err", "det_lemma_form"});
  double worst = 0, margin = std::numeric_limits<double>::infinity(), worst_lemma = 0;
  const ScalarPhase phi = log_phase_fn(w);
  for (int n : ns) {
    require(n == 1 || n == 2, "ns entries must be 1 or 2");
    for (int k = 0; k < pairs; ++k) {
      Vec y, yp;
      do {
        y = random_sphere_point(n, rng);
        yp = random_sphere_point(n, rng);
      } while ((y - yp).norm() < sep);
      const double d = (y - yp).norm();
      const double fd = mixed_hessian_det(phi, y, yp, step);
      const double sym = log_phase_symbolic_det(w, y, yp);
      // Determinant lemma: det(v v^T - |v|^2/2 I) = -(-|v|^2/2)^{n+1}.
      const double lemma = -std::pow(4 * w / std::pow(d, 4), n + 1) * std::pow(-0.5 * d * d, n + 1);
      const double rel = std::abs(fd - sym) / std::abs(sym);
      worst = std::max(worst, rel);
      margin = std::min(margin, std::abs(fd));
      csv.cell(n).cell(k).cell(d).cell(fd).cell(sym).cell(rel).cell(lemma);
      csv.end_row();
    }
    for (int k = 0; k < get_int(c, "lemma_samples"); ++k) {
      const Vec v = random_normal(rng, n + 1);
      double lam = uniform(rng, 0.5, 2.0) * (uniform(rng, 0, 1) < 0.5 ? -1 : 1);
      worst_lemma = std::max(worst_lemma, determinant_lemma_residual(v, lam * Mat::Identity(n + 1, n + 1)));
    }
  }
  csv.footer("max relative error " + fmt17(worst));
  csv.footer("min |det| (nonvanishing margin) " + fmt17(margin));
  csv.footer("determinant lemma max residual " + fmt17(worst_lemma));
  CommandOutput out;
  out.summary.push_back("max relative FD error " + fmt17(worst) + ", min |det| " + fmt17(margin) +
                        ", lemma residual " + fmt17(worst_lemma));
  out.exit_code = worst <= tol && worst_lemma <= tol_lemma && margin > 0 ? kPass : kCounterexample;
  out.files.emplace_back("hessian.csv", csv.str());
  return out;
}

json power_defaults() { return json{{"tol", 1e-8}, {"max_iter", 0}, {"restarts", 3}}; }

}  // namespace

BoxSet boxset_from_json(const json& spec) {
  try {
    if (spec.contains("cantor")) {
      const json& c = spec.at("cantor");
      CantorSpec s = parse_cantor(c);
      return cantor_generate(s, c.value("dims", 1));
    }
    if (spec.contains("boxes")) {
      const int n = spec.value("dims", 1);
      const int m = spec.at("resolution").get<int>();
      std::vector<std::pair<Vec, Vec>> boxes;
      for (const auto& b : spec.at("boxes")) {
        const auto lo = b.at(0).get<std::vector<double>>();
        const auto hi = b.at(1).get<std::vector<double>>();
        require(static_cast<int>(lo.size()) == n && static_cast<int>(hi.size()) == n, "boxes: corner dimension mismatch");
        boxes.emplace_back(Eigen::Map<const Vec>(lo.data(), n), Eigen::Map<const Vec>(hi.data(), n));
      }
      return BoxSet::from_boxes(n, m, boxes);
    }
    for (const char* k : {"empty", "full"})
      if (spec.contains(k)) {
        const json& e = spec.at(k);
        const int n = e.value("dims", 1), m = e.at("resolution").get<int>();
        return std::string(k) == "empty" ? BoxSet::make_empty(n, m) : BoxSet::make_full(n, m);
      }
  } catch (const json::exception& e) {
    throw UsageError(std::string("set spec: ") + e.what());
  }
  throw UsageError("set spec: expected one of cantor, boxes, empty, full");
}

const std::vector<CommandInfo>& commands() {
  static const std::vector<CommandInfo> cmds = {
      {"algebra-verify", "commutator table, flow compatibility and horocyclic commutation",
       json{{"n_min", 2},
            {"n_max", 4},
            {"samples", 500},
            {"t_max", 5.0},
            {"inject_sign_flip", false},
            {"tol_table", 1e-12},
            {"tol_flow", 1e-9},
            {"tol_horocyclic", 1e-8}},
       cmd_algebra_verify},
      {"flow-trace", "geodesic flow trace with theta-translation and expansion-rate checks",
       json{{"n", 2}, {"t_max", 3.0}, {"steps", 60}, {"spread", 0.5}, {"tol_flow", 1e-9}, {"tol_theta", 1e-8},
            {"tol_rate", 1e-6}},
       cmd_flow_trace},
      {"group-decompose", "KAN and normalizer decompositions, block predicates vs conjugation",
       json{{"n", 3}, {"l", 2}, {"samples", 500}, {"scale", 1.0}, {"tol_recon", 1e-10}, {"conjugation_samples", 20}},
       cmd_group_decompose},
      {"porosity-check", "ball/line porosity of a set spec, or randomized lemma trials",
       json{{"set", nullptr},
            {"nu", 0.1},
            {"alpha0", 0.06},
            {"alpha1", 1.0},
            {"mode", "ball"},
            {"directions", 8},
            {"reverify", true},
            {"lemma", nullptr}},
       cmd_porosity_check},
      {"sphere-porosity", "chart-level porosity on S^1 / S^2",
       json{{"n", 1},
            {"set",
             {{"type", "cantor_arc"},
              {"base", 3},
              {"kept_digits", {0, 2}},
              {"depth", 5},
              {"offset", -0.7},
              {"length", 1.4},
              {"halfwidth", 0.02}}},
            {"mode", "ball"},
            {"nu", 0.1},
            {"alpha0", 0.05},
            {"alpha1", 0.5},
            {"m", 8000},
            {"directions", 8},
            {"mapped", true}},
       cmd_sphere_porosity},
      {"fup-scan", "masked operator norms across an N-ladder with a decay fit",
       json{{"core", "fourier"},
            {"n", 1},
            {"full_masks", false},
            {"cantor", {{"base", 3}, {"kept_digits", {0, 2}}}},
            {"depths", {3, 4, 5, 6, 7, 8}},
            {"rho", nullptr},
            {"lower_bound_check", false},
            {"quadratic", 0.1},
            {"w", 1.0},
            {"sphere_points", 4096},
            {"arc_length", M_PI / 2},
            {"arc_separation", 2 * M_PI / 3},
            {"dense_limit", 4096},
            {"power", power_defaults()}},
       cmd_fup_scan},
      {"fio-sphere", "log-phase kernel on S^1 across w values",
       json{{"ws", {0.125, 1.0, 8.0}},
            {"cantor", {{"base", 5}, {"kept_digits", {0, 4}}}},
            {"depths", {1, 2, 3, 4}},
            {"sphere_points", 4096},
            {"arc_length", M_PI / 2},
            {"arc_separation", 2 * M_PI / 3},
            {"power", power_defaults()}},
       cmd_fio_sphere},
      {"words-count", "exact counts of uncontrolled words against the exponent bound",
       json{{"alpha", "0.04"},
            {"rho", 0.9},
            {"j_min", 40},
            {"j_max", 60},
            {"h", nullptr},
            {"slack", 0.1},
            {"verify_enumeration", true}},
       cmd_words_count},
      {"hessian-check", "mixed Hessian of the log phase: finite differences vs the symbolic product",
       json{{"ns", {1, 2}},
            {"pairs", 100},
            {"w", 1.0},
            {"min_separation", 0.1},
            {"fd_step", 0.0},
            {"tol_rel", 1e-4},
            {"tol_lemma", 1e-10},
            {"lemma_samples", 100}},
       cmd_hessian_check},
  };
  return cmds;
}

const CommandInfo& find_command(const std::string& name) {
  for (const auto& c : commands())
    if (c.name == name) return c;
  throw UsageError("unknown command '" + name + "'");
}

}  // namespace hyplab::lab
