#pragma once

// Exact word combinatorics over the alphabet {1,2}.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hyplab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct Word {
  std::vector<std::uint8_t> letters;  // each 1 or 2
  std::size_t size() const { return letters.size(); }
  std::string str() const;
  static Word parse(const std::string& s);
};

// Decimal literal ("0.04", "1/4", "3") to an exact rational.
Rational parse_rational(const std::string& s);
double to_double(const Rational& r);
double log_big(const BigInt& x);

struct LadderParams {
  double h = 0.5;
  double rho = 0.8;
  Rational alpha;
  int T0 = 1;
  int T1 = 4;
};

// T0 = ceil((rho/4) log(1/h)), T1 = 4 T0.  Values within 1e-9 of an integer snap to it.
std::pair<int, int> t_ladder(double h, double rho);
LadderParams make_ladder(double h, double rho, const Rational& alpha);

Rational ones_fraction(const Word& w);
// F(w) > alpha.
bool is_controlled(const Word& w, const Rational& alpha);

BigInt binomial(int n, int k);
// #{w in {1,2}^T0 : F(w) <= alpha} via the binomial tail.
BigInt count_uncontrolled(int T0, const Rational& alpha);
// Same count by exhaustive enumeration (T0 <= 24).
BigInt count_uncontrolled_enumerate(int T0, const Rational& alpha);
// Words of length 8 T0 whose eight blocks are all uncontrolled.
BigInt count_X(int T0, const Rational& alpha);
inline BigInt count_X(const LadderParams& p) { return count_X(p.T0, p.alpha); }
// Two-block enumeration squared, then raised to the fourth power.
BigInt count_X_meet_in_middle(int T0, const Rational& alpha);

// Exhaustive split of {1,2}^{8 T0} for T0 <= 3; words encoded as bit patterns (bit set = letter 1).
struct XYSplit {
  std::vector<std::uint32_t> X;
  std::uint64_t y_count = 0;
  std::vector<std::uint32_t> Y;  // filled only when requested
};
XYSplit split_XY(int T0, const Rational& alpha, bool keep_y = false);
bool word_in_X(std::uint32_t bits, int T0, const Rational& alpha);

struct BoundRow {
  double h = 0;
  int T0 = 0;
  BigInt count;
  double ratio = 0;  // log(count) / log(1/h)
  double logC = 0;   // log(count) - 4 sqrt(alpha) log(1/h)
  bool within = false;
};
std::vector<BoundRow> bound_check(double rho, const Rational& alpha, const std::vector<double>& h_ladder,
                                  double slack = 0.1);

}  // namespace hyplab
