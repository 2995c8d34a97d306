#include "hyplab/lab.hpp"
#include "hyplab/lorentz.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <algorithm>
#include <cmath>

namespace hyplab::lab {

std::vector<SuiteRow> commutator_suite(int n, bool inject_sign_flip, double tol_float) {
  std::vector<SuiteRow> rows;
  using Exact = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                              boost::multiprecision::et_off>;
  const auto exact = commutator_table<Exact>(n, inject_sign_flip);
  const auto flt = commutator_table<double>(n, inject_sign_flip);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    SuiteRow r;
    r.n = n;
    r.suite = "commutator_exact";
    r.name = exact[i].name;
    r.residual = exact[i].residual.convert_to<double>();
    r.tol = 0;
    r.pass = exact[i].residual == 0;
    rows.push_back(r);
  }
  for (const auto& rel : flt) {
    SuiteRow r;
    r.n = n;
    r.suite = "commutator_float";
    r.name = rel.name;
    r.residual = rel.residual;
    r.tol = tol_float;
    r.pass = rel.residual <= tol_float;
    rows.push_back(r);
  }
  return rows;
}

namespace {
double rel_diff(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
}
}  // namespace

SuiteRow flow_compat_suite(int n, int samples, double t_max, double tol, Rng& rng) {
  SuiteRow r;
  r.n = n;
  r.suite = "flow_compat";
  r.name = "geodesic flow vs exp(tX)";
  r.tol = tol;
  const Mat X = gen_X(n).m;
  for (int k = 0; k < samples; ++k) {
    const GroupElement g = random_group_element(n, rng, 3, 0.5);
    const double t = uniform(rng, -t_max, t_max);
    const auto [x, xi] = frame_projection(g.matrix());
    const auto [x1, xi1] = geodesic_flow(x, xi, t);
    const auto [x2, xi2] = frame_projection(g.matrix() * exp_general(t * X));
    Mat a(x1.size(), 2), b(x1.size(), 2);
    a << x1, xi1;
    b << x2, xi2;
    r.residual = std::max(r.residual, rel_diff(a, b));
  }
  r.pass = r.residual <= tol;
  return r;
}

SuiteRow horocyclic_suite(int n, int samples, double t_max, double tol, Rng& rng) {
  SuiteRow r;
  r.n = n;
  r.suite = "horocyclic";
  r.name = "exp(sU) a(-t) = a(-t) exp(s e^{+-t} U)";
  r.tol = tol;
  for (int k = 0; k < samples; ++k) {
    const Sign sg = k % 2 ? Sign::Minus : Sign::Plus;
    const int i = 1 + static_cast<int>(uniform(rng, 0, n)) % n;
    const double s = uniform(rng, -2, 2);
    const double t = uniform(rng, -t_max, t_max);
    const LieAlgebraElement U = gen_U(sg, i, n);
    const Mat lhs = exp_flow(U, s).matrix() * a_of(-t, n).matrix();
    const Mat rhs = a_of(-t, n).matrix() * exp_flow(U, s * std::exp(sign_value(sg) * t)).matrix();
    r.residual = std::max(r.residual, rel_diff(lhs, rhs));
  }
  r.pass = r.residual <= tol;
  return r;
}

}  // namespace hyplab::lab
