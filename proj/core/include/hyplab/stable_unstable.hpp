#pragma once

// Tangent geometry of T*H^{n+1} in the hyperboloid model and the maps kappa^{+-}.

#include "hyplab/lorentz.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hyplab {

struct PhasePoint {
  Vec x;
  Vec xi;
  int dim() const { return lorentz_dim(x); }
};

struct TangentPair {
  Vec vx;
  Vec vxi;
};

struct KappaPoint {
  double w = 0;
  Vec y;
  double theta = 0;
  Vec eta;
  std::string serialize() const;  // "w theta y[0..n] eta[0..n]"
};

// |xi|_g for xi tangent at x.
double energy(const PhasePoint& p);
bool on_cosphere(const PhasePoint& p, double tol = 1e-9);
bool tangent_valid(const PhasePoint& p, const TangentPair& v, double tol = 1e-9);

PhasePoint phase_point_from_frame(const Mat& g);
PhasePoint random_phase_point(int n, Rng& rng, double spread = 1.0);

Vec hyperboloid_to_ball(const Vec& x);
Vec ball_to_hyperboloid(const Vec& q);

// Forward (+) / backward (-) endpoint of the geodesic through p, as a unit vector.
Vec boundary_map(const PhasePoint& p, Sign s);
// Same endpoint by flowing to |t| = t_far and projecting to the ball model.
Vec boundary_map_by_flow(const PhasePoint& p, Sign s, double t_far = 30.0);

enum class Bundle { Stable, Unstable };
std::vector<TangentPair> stable_unstable_basis(const PhasePoint& p, Bundle which);

// Derivative of the homogeneous geodesic flow applied to a tangent vector.
TangentPair flow_differential(const PhasePoint& p, const TangentPair& v, double t);
// Generator of the flow at p: d/dt phi_t(p) at t = 0.
TangentPair flow_direction(const PhasePoint& p);
// Minkowski norm of the base component (the metric pulled back to E_s / E_u).
double tangent_norm_g(const TangentPair& v);
// |dphi_t v|_g / |v|_g; throws unless v lies in E_u or E_s.
double expansion_rate(const PhasePoint& p, const TangentPair& v, double t, double tol = 1e-8);

double poisson_kernel(const Vec& x_ball, const Vec& y);
Vec half_stereographic(const Vec& y, const Vec& yprime);

KappaPoint kappa(const PhasePoint& p, Sign s);

// Ball-model cotangent chart (q, zeta) <-> phase point.
PhasePoint from_ball_chart(const Vec& q, const Vec& zeta);
void to_ball_chart(const PhasePoint& p, Vec& q, Vec& zeta);

// Generic pullback residual max|J^T Wt J - Ws| with J by central differences.
double symplectic_residual(const std::function<Vec(const Vec&)>& F, const Vec& z, const Mat& omega_src,
                           const Mat& omega_tgt, double step);
// Canonical form dzeta ^ dq on R^{2m} with coordinates (q, zeta).
Mat canonical_form(int m);

double symplectic_exactness_check(Sign s, const PhasePoint& p, double fd_step = 1e-4);

// Weak unstable (sign +) or weak stable (sign -) basis: E plus the flow direction.
std::vector<TangentPair> weak_foliation_basis(const PhasePoint& p, Sign s);
// max over v of (|dw| + |dy|) / |dkappa v| by central differences with retraction.
double foliation_straightening_residual(Sign s, const PhasePoint& p, const std::vector<TangentPair>& dirs,
                                        double fd_step = 1e-5);
double foliation_straightening_check(Sign s, const PhasePoint& p, double fd_step = 1e-5);

// Full-rank check of R X + R(xi d_xi) + E_s + E_u: smallest singular value of the stacked basis.
double tangent_decomposition_margin(const PhasePoint& p);

// Pushes p + eps v back onto T*H (hyperboloid and xi orthogonal to x).
PhasePoint retract(const PhasePoint& p);

}  // namespace hyplab
