#include <doctest.h>

#include "hyplab/flowbox.hpp"

#include <cmath>

using namespace hyplab;

namespace {

PhasePoint base_point(int n) { return {basis_vector(n, 0), basis_vector(n, 1)}; }

MetricBallUnion single(const PhasePoint& c, double r) {
  MetricBallUnion u;
  u.balls.push_back({c, r});
  return u;
}

}  // namespace

TEST_CASE("chordal distance and ball unions") {
  const PhasePoint p = base_point(2);
  CHECK(chordal_distance(p, p) == 0.0);
  CHECK(chordal_distance(p, {p.x, 3 * p.xi}) < 1e-15);
  const auto u = single(p, 0.1);
  CHECK(u.contains(p));
  MetricBallUnion none, all;
  all.everything = true;
  CHECK_FALSE(none.contains(p));
  CHECK(all.oracle()(p));
  Rng rng(51);
  for (int k = 0; k < 50; ++k) {
    const PhasePoint q = random_phase_point(2, rng);
    CHECK(u.contains(q) == (chordal_distance(p, q) < 0.1));
  }
}

TEST_CASE("ball lattice") {
  const auto l = ball_lattice(2, 1.0, 5);
  CHECK(l.size() == 13);
  for (const auto& v : l) CHECK(v.norm() <= 1 + 1e-12);
  CHECK(ball_lattice(3, 0.5, 1).size() == 1);
  CHECK_THROWS_AS(ball_lattice(2, 1.0, 0), DomainError);
}

TEST_CASE("flowbox search on trivial sets") {
  const GroupElement q = GroupElement::identity(2);
  MetricBallUnion none, all;
  all.everything = true;
  for (FlowboxMode mode : {FlowboxMode::Ball, FlowboxMode::Line}) {
    const auto e = flowbox_porosity_sample(none.oracle(), q, 0.5, 0.1, 0.01, mode, Sign::Plus, 3);
    CHECK(e.found);
    CHECK(e.shift.norm() == 0.0);
    CHECK(e.shifts_tried == 1);
    const auto f = flowbox_porosity_sample(all.oracle(), q, 0.5, 0.1, 0.01, mode, Sign::Plus, 3);
    CHECK_FALSE(f.found);
    CHECK(f.points_checked > 0);
  }
  CHECK_THROWS_AS(flowbox_porosity_sample(none.oracle(), q, 0.0, 0.1, 0.01, FlowboxMode::Ball, Sign::Plus, 3),
                  DomainError);
}

TEST_CASE("flowbox avoids a single ball") {
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    const GroupElement q = GroupElement::identity(1);
    const PhasePoint c = phase_point_from_frame(q.matrix());
    const auto omega = single(c, 0.05).oracle();
    CHECK_FALSE(flowbox_misses(omega, q, Vec::Zero(1), 1.0, 0.1, 0.01, s, 5));
    const auto r = flowbox_porosity_sample(omega, q, 1.0, 0.1, 0.01, FlowboxMode::Ball, s, 5);
    REQUIRE(r.found);
    CHECK(r.shift.norm() > 0);
    // Independent re-check of the box center on a finer lattice.
    CHECK(flowbox_misses(omega, q, r.shift, 1.0, 0.1, 0.01, s, 9));
    const PhasePoint moved = phase_point_from_frame(q.matrix() * b_of(-r.shift, s).matrix());
    CHECK(chordal_distance(moved, c) >= 0.05);
  }
}

TEST_CASE("propagated support membership") {
  const PhasePoint p = base_point(1);
  MetricBallUnion all, none;
  all.everything = true;
  CHECK(propagated_support_member(p, Word::parse("1"), all.oracle(), none.oracle(), Sign::Minus));
  CHECK_FALSE(propagated_support_member(p, Word::parse("2"), all.oracle(), none.oracle(), Sign::Minus));
  CHECK_FALSE(propagated_support_member({p.x, 10 * p.xi}, Word::parse("1"), all.oracle(), all.oracle(), Sign::Plus));
  CHECK_THROWS_AS(propagated_support_member(p, Word{}, all.oracle(), all.oracle(), Sign::Plus), DomainError);

  // Two-letter words against an explicit trajectory.
  Rng rng(52);
  for (int k = 0; k < 40; ++k) {
    const PhasePoint q = random_phase_point(1, rng, 0.7);
    const auto chi1 = single(base_point(1), 1.0).oracle();
    const auto chi2 = single(q, 0.8).oracle();
    const auto at = [&](double t) {
      auto [x, xi] = geodesic_flow_homogeneous(q.x, q.xi, t);
      return PhasePoint{x, xi};
    };
    const bool minus = chi2(at(0)) && chi1(at(1));
    const bool plus = chi2(at(-1)) && chi1(at(-2));
    CHECK(propagated_support_member(q, Word::parse("21"), chi1, chi2, Sign::Minus) == minus);
    CHECK(propagated_support_member(q, Word::parse("21"), chi1, chi2, Sign::Plus) == plus);
    const PhasePoint scaled{q.x, 2 * q.xi};
    CHECK(propagated_support_member(scaled, Word::parse("21"), chi1, chi2, Sign::Minus) == minus);
  }
}
