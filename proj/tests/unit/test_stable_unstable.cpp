#include <doctest.h>

#include "hyplab/lorentz.hpp"
#include "hyplab/stable_unstable.hpp"

#include <cmath>

using namespace hyplab;

namespace {

PhasePoint base_point(int n) { return {basis_vector(n, 0), basis_vector(n, 1)}; }

Vec unit_axis(int dim, int k, double sign = 1) {
  Vec v = Vec::Zero(dim);
  v[k] = sign;
  return v;
}

}  // namespace

TEST_CASE("ball model conversion") {
  const int n = 2;
  CHECK(hyperboloid_to_ball(basis_vector(n, 0)).norm() == 0.0);
  Vec x = Vec::Zero(n + 2);
  x[0] = std::cosh(1.0);
  x[1] = std::sinh(1.0);
  const Vec q = hyperboloid_to_ball(x);
  CHECK(q[0] == doctest::Approx(std::tanh(0.5)).epsilon(1e-15));
  CHECK(q.tail(n).norm() == 0.0);
  Rng rng(2);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const PhasePoint p = random_phase_point(n, rng, 1.5);
    worst = std::max(worst, (ball_to_hyperboloid(hyperboloid_to_ball(p.x)) - p.x).norm() / p.x.norm());
  }
  CHECK(worst <= 1e-12);
  CHECK_THROWS_AS(hyperboloid_to_ball(basis_vector(n, 1)), DomainError);
}

TEST_CASE("boundary maps") {
  const int n = 2;
  const PhasePoint p = base_point(n);
  CHECK((boundary_map(p, Sign::Plus) - unit_axis(n + 1, 0)).norm() < 1e-15);
  CHECK((boundary_map(p, Sign::Minus) - unit_axis(n + 1, 0, -1)).norm() < 1e-15);
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const PhasePoint q = random_phase_point(n, rng);
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      const Vec b = boundary_map(q, s);
      CHECK((b - boundary_map_by_flow(q, s)).norm() <= 1e-8);
      for (double t : {-2.0, 1.0, 3.0}) {
        const auto [x, xi] = geodesic_flow(q.x, q.xi, t);
        CHECK((boundary_map({x, xi}, s) - b).norm() <= 1e-8);
      }
      CHECK((boundary_map({q.x, 2.5 * q.xi}, s) - b).norm() <= 1e-12);
    }
    CHECK((boundary_map(q, Sign::Plus) - boundary_map(q, Sign::Minus)).norm() > 1e-3);
  }
}

TEST_CASE("stable and unstable bases") {
  const int n = 3;
  const PhasePoint p = base_point(n);
  const auto eu = stable_unstable_basis(p, Bundle::Unstable), es = stable_unstable_basis(p, Bundle::Stable);
  REQUIRE(eu.size() == static_cast<std::size_t>(n));
  REQUIRE(es.size() == static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    CHECK(eu[i].vx.head(2).norm() == 0.0);
    CHECK((eu[i].vx - eu[i].vxi).norm() == 0.0);
    CHECK((es[i].vx + es[i].vxi).norm() == 0.0);
    CHECK(tangent_valid(p, eu[i]));
    CHECK(tangent_valid(p, es[i]));
  }
  Rng rng(8);
  for (int k = 0; k < 20; ++k) CHECK(tangent_decomposition_margin(random_phase_point(n, rng)) > 1e-3);
}

TEST_CASE("expansion rates") {
  const int n = 2;
  const PhasePoint p = base_point(n);
  const auto eu = stable_unstable_basis(p, Bundle::Unstable), es = stable_unstable_basis(p, Bundle::Stable);
  CHECK(expansion_rate(p, eu[0], 0.0) == doctest::Approx(1.0));
  CHECK(expansion_rate(p, eu[0], 1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK(expansion_rate(p, es[0], 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  TangentPair mixed{eu[0].vx + es[1].vx, eu[0].vxi + es[1].vxi};
  CHECK_THROWS_AS(expansion_rate(p, mixed, 1.0), DomainError);
  Rng rng(9);
  for (int k = 0; k < 20; ++k) {
    const PhasePoint q = random_phase_point(3, rng);
    const double t = uniform(rng, 0, 3);
    for (const auto& v : stable_unstable_basis(q, Bundle::Unstable))
      CHECK(std::abs(expansion_rate(q, v, t) / std::exp(t) - 1) <= 1e-6);
    for (const auto& v : stable_unstable_basis(q, Bundle::Stable))
      CHECK(std::abs(expansion_rate(q, v, t) / std::exp(-t) - 1) <= 1e-6);
  }
}

TEST_CASE("Poisson kernel and half stereographic projection") {
  const Vec y = unit_axis(3, 1);
  CHECK(poisson_kernel(Vec::Zero(3), y) == 1.0);
  CHECK(poisson_kernel(0.9 * y, y) == doctest::Approx(19.0).epsilon(1e-12));
  CHECK_THROWS_AS(poisson_kernel(y, y), DomainError);
  CHECK((half_stereographic(y, unit_axis(3, 2)) - unit_axis(3, 2)).norm() < 1e-15);
  CHECK(half_stereographic(y, -y).norm() < 1e-15);
  CHECK_THROWS_AS(half_stereographic(y, y), DomainError);
  Rng rng(10);
  double worst = 0;
  for (int k = 0; k < 1000; ++k) {
    Vec a = random_normal(rng, 3), b = random_normal(rng, 3);
    a.normalize();
    b.normalize();
    worst = std::max(worst, std::abs(a.dot(half_stereographic(a, b))));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("kappa at the base point") {
  const int n = 2;
  const KappaPoint k = kappa(base_point(n), Sign::Plus);
  CHECK(k.w == doctest::Approx(1.0));
  CHECK((k.y - unit_axis(n + 1, 0, -1)).norm() < 1e-15);
  CHECK(std::abs(k.theta) < 1e-15);
  CHECK(k.eta.norm() < 1e-15);
  const KappaPoint k2 = kappa({basis_vector(n, 0), 2 * basis_vector(n, 1)}, Sign::Plus);
  CHECK(k2.w == doctest::Approx(2.0));
}

TEST_CASE("theta is translated by the flow") {
  Rng rng(12);
  for (int k = 0; k < 20; ++k) {
    const PhasePoint p = random_phase_point(2, rng);
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      const double th = kappa(p, s).theta;
      for (double t : {0.5, 1.0, 2.0}) {
        const auto [x, xi] = geodesic_flow(p.x, p.xi, t);
        CHECK(std::abs(kappa({x, xi}, s).theta - (th - t)) <= 1e-8);
      }
    }
  }
}

TEST_CASE("kappa is injective on a grid") {
  Rng rng(14);
  std::vector<PhasePoint> pts;
  for (int k = 0; k < 40; ++k) pts.push_back(random_phase_point(2, rng));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double sep = std::max((pts[i].x - pts[j].x).norm(), (pts[i].xi - pts[j].xi).norm());
      if (sep < 1e-3) continue;
      const KappaPoint a = kappa(pts[i], Sign::Plus), b = kappa(pts[j], Sign::Plus);
      const double d = std::abs(a.w - b.w) + std::abs(a.theta - b.theta) + (a.y - b.y).norm() + (a.eta - b.eta).norm();
      CHECK(d >= 1e-6);
    }
}

TEST_CASE("symplectic pullback") {
  CHECK(symplectic_exactness_check(Sign::Plus, base_point(2)) <= 1e-5);
  CHECK(symplectic_exactness_check(Sign::Minus, base_point(2)) <= 1e-5);
  CHECK(symplectic_exactness_check(Sign::Plus, {basis_vector(2, 0), 2 * basis_vector(2, 1)}) <= 1e-5);
  const Mat w = canonical_form(3);
  CHECK(symplectic_residual([](const Vec& z) { return z; }, Vec::LinSpaced(6, 0.1, 0.6), w, w, 1e-4) <= 1e-12);
  Rng rng(15);
  for (int n : {1, 2, 3})
    for (int k = 0; k < 5; ++k) {
      const PhasePoint p = random_phase_point(n, rng, 0.8);
      CHECK(symplectic_exactness_check(Sign::Plus, p) <= 1e-5);
      CHECK(symplectic_exactness_check(Sign::Minus, p) <= 1e-5);
    }
  CHECK_THROWS_AS(symplectic_exactness_check(Sign::Plus, base_point(2), 1e-2), DomainError);
}

TEST_CASE("foliation straightening with a control") {
  const int n = 2;
  const PhasePoint p = base_point(n);
  const auto flow = std::vector<TangentPair>{flow_direction(p)};
  CHECK(foliation_straightening_residual(Sign::Plus, p, flow) <= 1e-8);
  CHECK(foliation_straightening_check(Sign::Plus, p) <= 1e-6);
  CHECK(foliation_straightening_check(Sign::Minus, p) <= 1e-6);
  CHECK(foliation_straightening_residual(Sign::Plus, p, stable_unstable_basis(p, Bundle::Stable)) > 0.1);
  CHECK(foliation_straightening_residual(Sign::Minus, p, stable_unstable_basis(p, Bundle::Unstable)) > 0.1);
  Rng rng(16);
  for (int k = 0; k < 10; ++k) {
    const PhasePoint q = random_phase_point(n, rng, 0.8);
    CHECK(foliation_straightening_check(Sign::Plus, q) <= 1e-6);
    CHECK(foliation_straightening_check(Sign::Minus, q) <= 1e-6);
  }
}
