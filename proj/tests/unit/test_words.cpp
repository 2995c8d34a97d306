#include <doctest.h>

#include "hyplab/words.hpp"

#include <bit>
#include <cmath>

using namespace hyplab;

namespace {

// Independent count: iterate k and add binomials from Pascal's triangle in double.
double pascal_tail(int T0, double alpha) {
  std::vector<double> row{1};
  for (int r = 1; r <= T0; ++r) {
    std::vector<double> next(r + 1, 1);
    for (int k = 1; k < r; ++k) next[k] = row[k - 1] + row[k];
    row = next;
  }
  double s = 0;
  for (int k = 0; k <= T0; ++k)
    if (k <= alpha * T0 + 1e-12) s += row[k];
  return s;
}

}  // namespace

TEST_CASE("words and rationals") {
  const Word w = Word::parse("1122");
  CHECK(w.size() == 4);
  CHECK(w.str() == "1122");
  CHECK(ones_fraction(w) == Rational(1, 2));
  CHECK(ones_fraction(Word::parse("2222")) == 0);
  CHECK_THROWS(Word::parse("1132"));
  CHECK(parse_rational("0.04") == Rational(1, 25));
  CHECK(parse_rational("1/4") == Rational(1, 4));
  CHECK(parse_rational("3") == 3);
  CHECK(to_double(Rational(1, 8)) == 0.125);
  CHECK(log_big(BigInt(1) << 2000) == doctest::Approx(2000 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("time ladder") {
  CHECK(t_ladder(std::exp(-40.0), 0.8) == std::pair<int, int>{8, 32});
  CHECK(t_ladder(std::exp(-40.0), 0.9).first == 9);
  CHECK(t_ladder(0.5, 0.8).first == 1);
  const auto p = make_ladder(std::exp(-40.0), 0.8, Rational(1, 4));
  CHECK(p.T0 == 8);
  CHECK(p.T1 == 32);
}

TEST_CASE("controlled words") {
  CHECK(is_controlled(Word::parse("1222"), Rational(1, 5)));
  CHECK_FALSE(is_controlled(Word::parse("1222"), Rational(1, 4)));
  CHECK(binomial(10, 3) == 120);
  CHECK(binomial(5, 7) == 0);
  CHECK(count_uncontrolled(4, Rational(3, 10)) == 5);
  CHECK(count_uncontrolled(4, Rational(1, 4)) == 5);
  CHECK(count_uncontrolled(4, Rational(1, 4) - Rational(1, 1000)) == 1);
  CHECK(count_X(4, Rational(3, 10)) == 390625);
  CHECK(count_X_meet_in_middle(4, Rational(3, 10)) == 390625);
}

TEST_CASE("binomial tail against enumeration and a floating oracle") {
  for (const auto& a : {Rational(1, 25), Rational(1, 10), Rational(1, 4), Rational(1, 3), Rational(1, 2)})
    for (int T0 = 1; T0 <= 16; ++T0) {
      const BigInt c = count_uncontrolled(T0, a);
      CHECK(c == count_uncontrolled_enumerate(T0, a));
      CHECK(c.convert_to<double>() == pascal_tail(T0, to_double(a)));
      if (T0 <= 12) CHECK(count_X(T0, a) == count_X_meet_in_middle(T0, a));
    }
}

TEST_CASE("counts are monotone in alpha and T0") {
  const Rational a(1, 10);
  for (int T0 = 1; T0 < 40; ++T0) {
    CHECK(count_uncontrolled(T0, a) <= count_uncontrolled(T0, Rational(1, 5)));
    CHECK(count_X(T0, a) <= count_X(T0 + 1, a));
    CHECK(count_X(T0, a) <= pow(BigInt(2), 8 * T0));
  }
}

TEST_CASE("exhaustive X/Y split") {
  for (int T0 = 1; T0 <= 3; ++T0)
    for (const auto& a : {Rational(0), Rational(1, 3), Rational(1, 2)}) {
      const XYSplit s = split_XY(T0, a, T0 <= 2);
      CHECK(BigInt(s.X.size()) == count_X(T0, a));
      CHECK(s.X.size() + s.y_count == (std::uint64_t{1} << (8 * T0)));
      if (T0 <= 2) CHECK(s.Y.size() == s.y_count);
      for (auto x : s.X) CHECK(word_in_X(x, T0, a));
      for (auto y : s.Y) CHECK_FALSE(word_in_X(y, T0, a));
    }
  // alpha = 0: X is the single all-2 word.
  const XYSplit z = split_XY(2, Rational(0));
  REQUIRE(z.X.size() == 1);
  CHECK(std::popcount(z.X[0]) == 0);
}

TEST_CASE("bound check rows") {
  const Rational a(1, 25);
  std::vector<double> hs;
  for (int j = 40; j <= 60; ++j) hs.push_back(std::exp(-double(j)));
  const auto rows = bound_check(0.9, a, hs);
  REQUIRE(rows.size() == hs.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    CHECK(r.T0 == t_ladder(hs[i], 0.9).first);
    CHECK(r.count == count_X(r.T0, a));
    const double L = -std::log(hs[i]);
    CHECK(r.ratio == doctest::Approx(log_big(r.count) / L).epsilon(1e-12));
    CHECK(r.logC == doctest::Approx(log_big(r.count) - 4 * std::sqrt(0.04) * L).epsilon(1e-9));
    CHECK(r.within == (r.ratio <= 4 * std::sqrt(0.04) + 0.1));
  }
}
