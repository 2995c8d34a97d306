#pragma once

// Discretized subsets of [0,1]^n and three-valued porosity checkers.
//
// A BoxSet is a union of closed grid cells of pitch delta = 1/m.  Checkers work in
// cell units on a zero-padded grid so that balls and segments leaving the unit cube
// are handled without clipping.

#include "hyplab/common.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hyplab {

struct CantorSpec {
  int base = 3;
  std::vector<std::vector<int>> digits;  // kept digits per axis; one entry is broadcast
  int depth = 1;
  void validate(int n) const;
  const std::vector<int>& axis_digits(int axis) const;
};

struct BoxSet {
  int n = 1;
  int m = 1;  // cells per axis
  std::vector<std::uint8_t> mask;
  std::optional<CantorSpec> cantor;

  double delta() const { return 1.0 / m; }
  std::size_t cell_count() const { return mask.size(); }
  std::size_t occupied() const;
  bool empty_set() const { return occupied() == 0; }
  bool at(const std::vector<int>& c) const;
  void set(const std::vector<int>& c, bool v = true);
  std::vector<int> coords(std::size_t idx) const;
  std::size_t index(const std::vector<int>& c) const;
  Vec cell_center(std::size_t idx) const;
  bool subset_of(const BoxSet& other) const;
  bool operator==(const BoxSet& o) const { return n == o.n && m == o.m && mask == o.mask; }

  static BoxSet make_empty(int n, int m);
  static BoxSet make_full(int n, int m);
  // Cells whose interior meets the closed box [lo, hi].
  static BoxSet from_boxes(int n, int m, const std::vector<std::pair<Vec, Vec>>& boxes);
};

BoxSet cantor_generate(const CantorSpec& spec, int n);
// Splits each cell into factor^n subcells.
BoxSet refine(const BoxSet& x, int factor);
BoxSet restrict_to_box(const BoxSet& x, const Vec& lo, const Vec& hi);

// Squared Euclidean distance from each cell center to the nearest marked center, in cell units.
// Unmarked-everywhere input yields +infinity.  Axis 0 is the fastest-varying index.
std::vector<double> edt_squared(const std::vector<std::uint8_t>& marked, const std::vector<int>& shape);
// Same quantity by exhaustive search; reference for tests.
std::vector<double> edt_squared_brute(const std::vector<std::uint8_t>& marked, const std::vector<int>& shape);

enum class PorosityKind { Ball, Line };
enum class Verdict { CertifiedPorous, CounterexampleFound, Inconclusive };
const char* verdict_name(Verdict v);
const char* porosity_kind_name(PorosityKind k);

struct ScaleRow {
  double R = 0;
  double margin_lo = 0;  // guaranteed clearance / (nu R)
  double margin_hi = 0;  // clearance upper bound / (nu R) over windows fully inside the grid
  Verdict verdict = Verdict::Inconclusive;
};

struct PorosityWitness {
  Vec point;      // ball center, or segment start
  Vec direction;  // empty for balls
  double R = 0;
};

struct PorosityReport {
  PorosityKind kind = PorosityKind::Ball;
  double nu = 0;
  double alpha0 = 0;
  double alpha1 = 0;
  int directions = 0;
  std::vector<ScaleRow> rows;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<PorosityWitness> witness;
  double min_margin() const;
};

// alpha0 * 2^{k/2} up to alpha1, closed at both ends.
std::vector<double> scale_ladder(double alpha0, double alpha1);

PorosityReport ball_porosity_check(const BoxSet& x, double nu, double alpha0, double alpha1);
PorosityReport line_porosity_check(const BoxSet& x, double nu, double alpha0, double alpha1, int directions);

std::vector<Vec> line_directions(int n, int count);

// Direct re-check of a counterexample against the occupied cells, without the transform.
bool reverify_witness(const BoxSet& x, const PorosityReport& report);

// ---- transformations ----

BoxSet affine_image(const BoxSet& x, double lambda, const Vec& y);
// Cells whose interior meets {p : dist(p, X) < alpha2}.
BoxSet neighborhood(const BoxSet& x, double alpha2);

struct SmoothMap {
  std::string name;
  std::function<Vec(const Vec&)> f;
  std::function<Mat(const Vec&)> jacobian;
};
SmoothMap identity_map(int n);
SmoothMap linear_map(const Mat& a);
// x -> x + amp sin(2 pi x) in each coordinate.
SmoothMap sine_perturbation(int n, double amp);
// 1 / (1 - 2 pi amp): bi-Lipschitz constant of sine_perturbation for 2 pi amp < 1.
double sine_perturbation_C1(double amp);
// sup |(kappa^{-1})''| for the one-dimensional sine perturbation, from a dense scan.
double sine_perturbation_C2(double amp);
// max(sigma_max, 1/sigma_min) of the Jacobian over random points of [0,1]^n.
double estimate_C1(const SmoothMap& kappa, int n, int samples, Rng& rng);

// Rasterized superset of kappa(X); requires kappa to map occupied cells into [0,1]^n.
BoxSet bilipschitz_image(const BoxSet& x, const SmoothMap& kappa, double C1);

// ---- lemma verifiers ----

struct LemmaTrial {
  bool hypothesis = false;  // hypothesis certified
  Verdict conclusion = Verdict::Inconclusive;
  bool violation = false;   // hypothesis certified but the conclusion was not
  double nu_in = 0;
  double nu_out = 0;
  double alpha0_out = 0;
  double alpha1_out = 0;
};

struct LemmaStats {
  std::string name;
  int trials = 0;
  int vacuous = 0;
  int violations = 0;
  void add(const LemmaTrial& t);
};

// Checker completeness slacks, in cell widths.  A set whose true clearance exceeds
// nu R by these amounts is always certified.
double ball_completeness_cells(int n);
double line_completeness_cells(int n);
// Ratio between the line checker's clearance demand and nu R (anchor lattice).
double line_anchor_factor(int n);

LemmaTrial verify_affine(const BoxSet& x, PorosityKind kind, double nu, double alpha0, double alpha1, double lambda,
                         const Vec& y, int directions = 8);
LemmaTrial verify_neighborhood(const BoxSet& x, PorosityKind kind, double nu, double alpha0, double alpha1,
                               double alpha2, int directions = 8);
LemmaTrial verify_bilipschitz(const BoxSet& x, PorosityKind kind, const SmoothMap& kappa, double C1, double C2,
                              double nu, double alpha0, double alpha1, int directions = 8);

enum class LemmaKind { Affine, Neighborhood, BiLipschitz };
const char* lemma_kind_name(LemmaKind k);

struct LemmaSuiteOptions {
  int trials = 200;
  std::uint64_t seed = 1;
  double two_d_fraction = 0.1;  // share of trials drawn in the plane (ball kind only)
};

// Random Cantor family: base 3..5, a proper digit set per axis, depth chosen so that
// base^depth <= max_cells, then refined by the largest integer factor that stays within max_cells.
BoxSet random_cantor(int n, int max_cells, Rng& rng);

// Randomized trials of one transfer lemma with Cantor-family inputs.
LemmaStats run_lemma_trials(LemmaKind lemma, PorosityKind kind, const LemmaSuiteOptions& opt = {});

}  // namespace hyplab
