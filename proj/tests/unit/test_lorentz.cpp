#include <doctest.h>

#include "hyplab/lorentz.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>

using namespace hyplab;

namespace {

using Exact = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

// Taylor series of exp, summed until terms vanish.  Independent of the library's Pade path.
Mat exp_taylor(const Mat& y) {
  Mat term = Mat::Identity(y.rows(), y.cols()), sum = term;
  for (int k = 1; k < 200; ++k) {
    term = term * y / k;
    sum += term;
    if (max_abs(term) < 1e-18) break;
  }
  return sum;
}

}  // namespace

TEST_CASE("minkowski inner product on basis vectors") {
  const int n = 3;
  CHECK(minkowski_inner(basis_vector(n, 0), basis_vector(n, 0)) == -1.0);
  CHECK(minkowski_inner(basis_vector(n, 1), basis_vector(n, 1)) == 1.0);
  CHECK(minkowski_inner(basis_vector(n, 0), basis_vector(n, 1)) == 0.0);
  CHECK_THROWS_AS(minkowski_inner(basis_vector(2, 0), basis_vector(3, 0)), DomainError);
}

TEST_CASE("point classification") {
  const int n = 2;
  CHECK(classify_point(basis_vector(n, 0)) == PointClass::Hyperboloid);
  Vec inf = Vec::Zero(n + 2);
  inf[0] = inf[1] = 1;
  CHECK(classify_point(inf) == PointClass::Boundary);
  CHECK(classify_point(basis_vector(n, 1)) == PointClass::Neither);
}

TEST_CASE("group membership") {
  const int n = 2;
  CHECK(is_group_element(Mat::Identity(n + 2, n + 2)));
  Mat flip = Mat::Identity(n + 2, n + 2);
  flip(0, 0) = -1;
  CHECK_FALSE(is_group_element(flip));
  CHECK(is_group_element(exp_flow(gen_X(n), 1.0).matrix()));
}

TEST_CASE("frame generators") {
  const int n = 2;
  const Mat a2 = generator(GenKind::A, 2, 0, n).m, r12 = generator(GenKind::R, 1, 2, n).m;
  CHECK(max_abs(gen_U(Sign::Plus, 1, n).m - (-a2 - r12)) == 0.0);
  Mat x = Mat::Zero(n + 2, n + 2);
  x(0, 1) = x(1, 0) = 1;
  CHECK(max_abs(gen_X(n).m - x) == 0.0);
  const Mat r23 = generator(GenKind::R, 2, 3, n).m;
  CHECK((r23.array() != 0).count() == 2);
  CHECK(max_abs(r23 + r23.transpose()) == 0.0);
  CHECK_THROWS_AS(generator(GenKind::Uplus, 3, 0, n), DomainError);
  for (auto k : {GenKind::X, GenKind::Uplus, GenKind::Uminus})
    CHECK(is_lie_algebra_element(generator(k, 1, 0, n).m, 0.0));
}

TEST_CASE("brackets of frame elements") {
  const int n = 2;
  const auto up1 = gen_U(Sign::Plus, 1, n), up2 = gen_U(Sign::Plus, 2, n), um1 = gen_U(Sign::Minus, 1, n);
  CHECK(max_abs(bracket(gen_X(n), up1).m - up1.m) == 0.0);
  CHECK(max_abs(bracket(up1, up2).m) == 0.0);
  CHECK(max_abs(bracket(up1, um1).m - 2 * gen_X(n).m) == 0.0);
}

TEST_CASE("exact commutator table has zero residual") {
  for (int n : {1, 2, 3, 4}) {
    const auto rows = commutator_table<Exact>(n);
    REQUIRE(!rows.empty());
    for (const auto& r : rows) {
      INFO(r.name);
      CHECK(r.residual == 0);
    }
    for (const auto& r : commutator_table<double>(n)) CHECK(r.residual <= 1e-12);
  }
}

TEST_CASE("a flipped generator sign is detected") {
  const auto rows = commutator_table<Exact>(2, true);
  int bad = 0;
  for (const auto& r : rows) bad += r.residual != 0;
  CHECK(bad > 0);
}

TEST_CASE("exponentials agree with a Taylor oracle") {
  const int n = 3;
  Rng rng(7);
  CHECK(max_abs(exp_flow(gen_X(n), 0).matrix() - Mat::Identity(n + 2, n + 2)) == 0.0);
  const Mat ax = exp_flow(gen_X(n), 0.7).matrix();
  CHECK(ax(0, 0) == doctest::Approx(std::cosh(0.7)).epsilon(1e-15));
  CHECK(ax(0, 1) == doctest::Approx(std::sinh(0.7)).epsilon(1e-15));
  CHECK(ax(2, 2) == 1.0);
  for (const char* label : {"X", "A3", "R23", "U1+", "U2-"}) {
    const auto y = parse_label(label, n);
    const double t = uniform(rng, -2, 2);
    INFO(label);
    CHECK(max_abs(exp_flow(y, t).matrix() - exp_taylor(t * y.m)) < 1e-12);
  }
  Mat combo = Mat::Zero(n + 2, n + 2);
  for (const char* label : {"X", "A3", "R23", "U1+", "U2-"}) combo += uniform(rng, -0.5, 0.5) * parse_label(label, n).m;
  CHECK(max_abs(exp_general(combo) - exp_taylor(combo)) < 1e-12);
}

TEST_CASE("horocyclic exponentials are quadratic in s") {
  const int n = 2;
  const auto u = gen_U(Sign::Plus, 1, n);
  CHECK(max_abs(u.m * u.m * u.m) == 0.0);
  const double s = 0.3;
  const Mat e = exp_flow(u, s).matrix();
  const Mat expect = Mat::Identity(n + 2, n + 2) + s * u.m + 0.5 * s * s * u.m * u.m;
  CHECK(max_abs(e - expect) < 1e-15);
  CHECK(std::abs(std::abs(e(0, 0)) - (1 + s * s / 2)) < 1e-15);
}

TEST_CASE("geodesic flow") {
  const int n = 2;
  const Vec e0 = basis_vector(n, 0), e1 = basis_vector(n, 1);
  auto [x0, xi0] = geodesic_flow(e0, e1, 0.0);
  CHECK((x0 - e0).norm() == 0.0);
  auto [x, xi] = geodesic_flow(e0, e1, 1.0);
  CHECK(x[0] == doctest::Approx(std::cosh(1.0)));
  CHECK(x[1] == doctest::Approx(std::sinh(1.0)));
  CHECK(xi[0] == doctest::Approx(std::sinh(1.0)));
  CHECK(xi[1] == doctest::Approx(std::cosh(1.0)));
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    const auto [px, pxi] = frame_projection(random_group_element(n, rng, 3, 0.5).matrix());
    const double s = uniform(rng, -2, 2), t = uniform(rng, -2, 2);
    const auto [a, b] = geodesic_flow(px, pxi, s);
    const auto [c, d] = geodesic_flow(a, b, t);
    const auto [e, f] = geodesic_flow(px, pxi, s + t);
    const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
    CHECK(std::max((c - e).cwiseAbs().maxCoeff(), (d - f).cwiseAbs().maxCoeff()) / scale < 1e-10);
  }
  CHECK_THROWS_AS(geodesic_flow(e0, 2 * e1, 1.0), DomainError);
}

TEST_CASE("products and inverses stay in the group") {
  Rng rng(11);
  for (int n : {1, 2, 5}) {
    const auto g = random_group_element(n, rng, 4, 0.7), h = random_group_element(n, rng, 4, 0.7);
    CHECK(is_group_element((g * h).matrix(), 1e-9));
    CHECK(is_group_element(g.inverse().matrix(), 1e-9));
    CHECK(max_abs((g * g.inverse()).matrix() - Mat::Identity(n + 2, n + 2)) < 1e-9);
  }
}

TEST_CASE("KAN decomposition") {
  const int n = 3;
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    const auto id = kan_decompose(GroupElement::identity(n), s);
    CHECK(max_abs(id.k.matrix() - Mat::Identity(n + 2, n + 2)) < 1e-14);
    CHECK(std::abs(id.t) < 1e-14);
    const auto ax = kan_decompose(a_of(0.8, n), s);
    CHECK(ax.t == doctest::Approx(0.8));
    CHECK(ax.v.norm() < 1e-12);
  }
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const auto g = random_group_element(n, rng, 5, 0.8);
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      const auto f = kan_decompose(g, s);
      CHECK(in_K(f.k.matrix(), 1e-9));
      CHECK(max_abs(f.a.matrix() - a_of(f.t, n).matrix()) < 1e-12);
      CHECK(max_abs(f.b.matrix() - b_of(f.v, s).matrix()) < 1e-12);
      CHECK(max_abs(f.k.matrix() * f.a.matrix() * f.b.matrix() - g.matrix()) / std::max(1.0, max_abs(g.matrix())) <
            1e-10);
    }
  }
}

TEST_CASE("standard subgroups and normalizers") {
  const int n = 3, l = 2;
  Rng rng(13);
  for (int ll = 2; ll <= n + 1; ++ll) CHECK(standard_subgroup_member(a_of(0.4, n).matrix(), ll));
  CHECK_FALSE(standard_subgroup_member(exp_flow(gen_U(Sign::Plus, 2, n), 0.5).matrix(), 2));
  const Mat w = random_standard_element(n, l, rng).matrix();
  CHECK(standard_subgroup_member(w, l));
  CHECK(normalizer_member(w, l));
  Mat k0 = Mat::Identity(n + 2, n + 2);
  k0.bottomRightCorner(n - l + 1, n - l + 1) = random_orthogonal(n - l + 1, rng, 1);
  CHECK(normalizer_member(k0, l));
  CHECK(normalizer_member_by_conjugation(k0, l, rng));
  const Mat u = exp_flow(gen_U(Sign::Plus, l, n), 0.6).matrix();
  CHECK_FALSE(normalizer_member(u, l));
  CHECK_FALSE(normalizer_member_by_conjugation(u, l, rng));

  const auto sw = normalizer_decompose(GroupElement::certify(w), l);
  CHECK(sw.kind == NormalizerKind::Centralizing);
  CHECK(max_abs(sw.k.matrix() - Mat::Identity(n + 2, n + 2)) == 0.0);
  const auto sk = normalizer_decompose(GroupElement::certify(k0), l);
  CHECK(max_abs(sk.w.matrix() - Mat::Identity(n + 2, n + 2)) == 0.0);

  Mat kneg = Mat::Identity(n + 2, n + 2);
  kneg.bottomRightCorner(n - l + 1, n - l + 1) = random_orthogonal(n - l + 1, rng, -1);
  const Mat g = w * k_reflection(n, l) * kneg;
  CHECK(normalizer_member(g, l, 1e-9));
  const auto sf = normalizer_decompose(GroupElement::certify(g, 1e-9), l);
  CHECK(sf.kind == NormalizerKind::Flipped);
  CHECK(max_abs(sf.w.matrix() * sf.k.matrix() - g) < 1e-10);
  CHECK_THROWS_AS(normalizer_decompose(GroupElement::certify(u), l), DomainError);
}

TEST_CASE("K_U membership") {
  const int n = 3;
  Rng rng(17);
  CHECK(ku_member(Mat::Identity(n + 2, n + 2)));
  const Mat rot = exp_flow(generator(GenKind::R, 2, 3, n), 0.4).matrix();
  CHECK_FALSE(ku_member(rot));
  CHECK_FALSE(ku_member_by_conjugation(rot));
  Mat k = Mat::Identity(n + 2, n + 2);
  k(2, 2) = -1;
  k.bottomRightCorner(n - 1, n - 1) = random_orthogonal(n - 1, rng, -1);
  CHECK(ku_member(k));
  CHECK(ku_member_by_conjugation(k));
}

TEST_CASE("dimension bounds") {
  CHECK_THROWS_AS(check_dimension(0), DomainError);
  CHECK_THROWS_AS(check_dimension(17), DomainError);
  CHECK_NOTHROW(check_dimension(16));
}
