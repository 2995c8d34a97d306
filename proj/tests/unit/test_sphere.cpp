#include <doctest.h>

#include "hyplab/sphere.hpp"

#include <cmath>

using namespace hyplab;

namespace {

Vec unit(Rng& rng, int dim) {
  Vec v = random_normal(rng, dim);
  return v / v.norm();
}

// Random point of the closed cap of the given angular radius around c.
Vec cap_point(Rng& rng, const GnomonicChart& c, double radius) {
  const int n = static_cast<int>(c.frame.cols());
  Vec dir = c.frame * unit(rng, n);
  const double t = uniform(rng, 0, radius);
  return std::cos(t) * c.center + std::sin(t) * dir;
}

CantorSpec mid_third(int depth) {
  CantorSpec s;
  s.digits = {{0, 2}};
  s.depth = depth;
  return s;
}

}  // namespace

TEST_CASE("gnomonic charts") {
  Rng rng(41);
  for (int n : {1, 2}) {
    const GnomonicChart c = make_chart(unit(rng, n + 1));
    CHECK(gnomonic_project(c, c.center).norm() < 1e-15);
    CHECK((c.frame.transpose() * c.frame - Mat::Identity(n, n)).norm() < 1e-12);
    CHECK((c.frame.transpose() * c.center).norm() < 1e-12);
    double worst = 0;
    for (int k = 0; k < 200; ++k) {
      const Vec y = cap_point(rng, c, c.radius);
      worst = std::max(worst, (gnomonic_unproject(c, gnomonic_project(c, y)) - y).norm());
      CHECK(gnomonic_project(c, y).norm() == doctest::Approx(std::tan(sphere_angle(y, c.center))).epsilon(1e-10));
    }
    CHECK(worst <= 1e-12);
    CHECK_THROWS_AS(gnomonic_project(c, -c.center), DomainError);
  }
}

TEST_CASE("great circles project to lines") {
  Rng rng(42);
  const GnomonicChart c = make_chart(unit(rng, 3));
  double worst = 0;
  for (int k = 0; k < 50; ++k)
    worst = std::max(worst, great_circle_collinearity(c, cap_point(rng, c, 0.4), cap_point(rng, c, 0.4)));
  CHECK(worst <= 1e-10);
}

TEST_CASE("chart bi-Lipschitz constants") {
  Rng rng(43);
  for (int n : {1, 2}) {
    const GnomonicChart c = make_chart(unit(rng, n + 1));
    const auto m = measure_chart_lipschitz(c, 1000, rng);
    CHECK(m.pairs == 1000);
    CHECK(m.C2 <= chart_C2(c.radius) + 1e-9);
    CHECK(m.C2 <= 2.0);
    CHECK(m.upper <= 1 + 1e-9);
  }
  CHECK(chart_C2(0.5) >= 1.0);
}

TEST_CASE("atlases cover the sphere") {
  for (int n : {1, 2}) {
    const ChartAtlas a = gnomonic_atlas(n);
    CHECK(atlas_covering_angle(a) < a.radius);
  }
  CHECK(gnomonic_atlas(1).charts.size() == 8);
  CHECK(gnomonic_atlas(1, 0.3).charts.size() == 12);
}

TEST_CASE("cap unions") {
  CapUnion none;
  none.n = 2;
  CHECK(none.empty_set());
  CapUnion all;
  all.n = 2;
  all.full = true;
  Vec y(3);
  y << 0, 0, 1;
  CHECK(all.distance(y) == 0.0);
  CHECK(all.within(y, 0.0));

  const CapUnion arc = cantor_arc_set(mid_third(3), 3, 0.0, 1.0);
  Vec p(2);
  p << std::cos(0.5), std::sin(0.5);
  CHECK(arc.distance(p) == doctest::Approx(0.5 - 1.0 / 3).epsilon(1e-12));
  p << 1, 0;
  CHECK(arc.distance(p) == 0.0);
  Rng rng(44);
  for (int k = 0; k < 500; ++k) {
    const Vec q = unit(rng, 2);
    const double d = arc.distance(q), r = uniform(rng, 0, 0.3);
    if (std::abs(d - r) > 1e-9) CHECK(arc.within(q, r) == (d <= r));
  }

  const CapUnion band = cantor_band_set(mid_third(2), 2, 0.0, 1.0, 0.05);
  Vec b(3);
  b << 1, 0, 0;
  CHECK(band.distance(b) == 0.0);
  b << std::cos(0.5), std::sin(0.5), 0;
  CHECK(band.distance(b) > 0.0);
  for (int k = 0; k < 500; ++k) {
    const Vec q = unit(rng, 3);
    const double d = band.distance(q), r = uniform(rng, 0, 0.3);
    if (std::abs(d - r) > 1e-9) CHECK(band.within(q, r) == (d <= r));
  }
}

TEST_CASE("chart porosity on the sphere") {
  const ChartAtlas atlas = gnomonic_atlas(1);
  CapUnion none;
  none.n = 1;
  CHECK(sphere_porosity_check(none, atlas, PorosityKind::Ball, 0.1, 0.05, 0.5, 1000).verdict ==
        Verdict::CertifiedPorous);
  CapUnion all;
  all.n = 1;
  all.full = true;
  CHECK(sphere_porosity_check(all, atlas, PorosityKind::Ball, 0.1, 0.05, 0.5, 1000).verdict ==
        Verdict::CounterexampleFound);
  const auto mapped = verify_mapped_porosity_s1(mid_third(5), 5, -0.7, 1.4, 0.1, 0.05, 0.5, 8000);
  CHECK(mapped.hypothesis);
  CHECK(mapped.holds);
  CHECK(mapped.nu_chart > 0);
  CHECK(mapped.nu_chart <= 0.1 / (2 * mapped.C2));
}

TEST_CASE("mixed Hessian of phases") {
  for (int n : {1, 2}) {
    const auto lin = [](const Vec& y, const Vec& yp) { return -2 * M_PI * y.dot(yp); };
    Vec y = Vec::Zero(n + 1), yp = Vec::Zero(n + 1);
    y[0] = 1;
    yp[n] = 1;
    CHECK(mixed_hessian_det(lin, y, yp, 1e-3) == doctest::Approx(std::pow(-2 * M_PI, n + 1)).epsilon(1e-6));
  }
  Vec y(2), yp(2);
  y << 1, 0;
  yp << -1, 0;
  CHECK(log_phase_symbolic_det(1.0, y, yp) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(mixed_hessian_det(log_phase_fn(1.0), y, yp) == doctest::Approx(-0.25).epsilon(1e-6));
  CHECK(log_phase(1.0, y, yp) == doctest::Approx(0.0).epsilon(1e-15));

  Rng rng(45);
  for (int n : {1, 2}) {
    for (int k = 0; k < 50; ++k) {
      const Vec a = unit(rng, n + 1), b = unit(rng, n + 1);
      if ((a - b).norm() < 0.1) continue;
      const double w = uniform(rng, 0.2, 3);
      const Mat hs = log_phase_mixed_hessian(w, a, b), hf = mixed_hessian_fd(log_phase_fn(w), a, b);
      CHECK((hs - hf).norm() <= 1e-5 * hs.norm());
      CHECK(hs.determinant() == doctest::Approx(log_phase_symbolic_det(w, a, b)).epsilon(1e-10));
      // The lemma form: sign (-1)^n and nonvanishing.
      const double det = log_phase_symbolic_det(w, a, b);
      CHECK(det * std::pow(-1.0, n) > 0);
    }
    for (int k = 0; k < 100; ++k) {
      const Vec v = random_normal(rng, n + 1);
      const Mat B = -0.5 * (1 + uniform(rng, 0, 1)) * Mat::Identity(n + 1, n + 1);
      CHECK(determinant_lemma_residual(v, B) <= 1e-10);
    }
  }
}
