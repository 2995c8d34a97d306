#pragma once

// Set oracles on the unit cosphere bundle and sampled hyperbolic porosity boxes.

#include "hyplab/lorentz.hpp"
#include "hyplab/stable_unstable.hpp"
#include "hyplab/words.hpp"

#include <functional>
#include <vector>

namespace hyplab {

using SetOracle = std::function<bool(const PhasePoint&)>;

// Euclidean distance in the ambient R^{n+2} x R^{n+2} between (x, xi/|xi|_g) pairs.
double chordal_distance(const PhasePoint& a, const PhasePoint& b);

struct MetricBall {
  PhasePoint center;
  double radius = 0;
};

struct MetricBallUnion {
  std::vector<MetricBall> balls;
  bool everything = false;
  bool contains(const PhasePoint& p) const;
  SetOracle oracle() const;
};

enum class FlowboxMode { Ball, Line };

struct FlowboxResult {
  bool found = false;
  Vec shift;           // u0, or t0 e_1 in line mode
  double t0 = 0;       // line mode only
  int shifts_tried = 0;
  int points_checked = 0;
};

// Lattice with k points per axis on [-radius, radius]^dim, kept inside the closed ball.
std::vector<Vec> ball_lattice(int dim, double radius, int k);

// True when every sampled point pi_S(q exp(U^s(u + shift)) exp(V^{-s} v)) misses the set.
bool flowbox_misses(const SetOracle& omega, const GroupElement& q, const Vec& shift, double alpha, double nu,
                    double eps, Sign s, int k, int* checked = nullptr);

FlowboxResult flowbox_porosity_sample(const SetOracle& omega, const GroupElement& q, double alpha, double nu,
                                      double eps, FlowboxMode mode, Sign s, int samples);

// Membership in the propagated support set A_s for a word over {1,2}:
//   s = Minus: phi_k(p) in supp chi_{w_k} for k = 0..T-1 (letters w_0..w_{T-1});
//   s = Plus:  phi_{-k}(p) in supp chi_{w_k} for k = 1..T (letters w_1..w_T);
// together with the energy band 1/4 <= |xi|_g <= 4.
bool propagated_support_member(const PhasePoint& p, const Word& word, const SetOracle& chi1, const SetOracle& chi2,
                               Sign s);

}  // namespace hyplab
