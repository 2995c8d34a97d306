#include "hyplab/words.hpp"
#include "hyplab/common.hpp"

#include <cmath>

namespace hyplab {

std::string Word::str() const {
  std::string s;
  for (auto c : letters) s += static_cast<char>('0' + c);
  return s;
}

Word Word::parse(const std::string& s) {
  Word w;
  for (char c : s) {
    if (c != '1' && c != '2') throw DomainError("word letters must be 1 or 2");
    w.letters.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return w;
}

Rational parse_rational(const std::string& s) {
  if (s.empty()) throw DomainError("empty rational literal");
  auto slash = s.find('/');
  if (slash != std::string::npos) return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
  bool neg = s[0] == '-';
  std::string body = neg ? s.substr(1) : s;
  auto dot = body.find('.');
  std::string ip = dot == std::string::npos ? body : body.substr(0, dot);
  std::string fp = dot == std::string::npos ? "" : body.substr(dot + 1);
  for (char c : ip + fp)
    if (c < '0' || c > '9') throw DomainError("bad rational literal '" + s + "'");
  BigInt num(ip.empty() ? "0" : ip);
  BigInt den = 1;
  for (char c : fp) {
    num = num * 10 + (c - '0');
    den *= 10;
  }
  Rational r(num, den);
  return neg ? Rational(-r) : r;
}

double to_double(const Rational& r) { return static_cast<double>(r); }

double log_big(const BigInt& x) {
  if (x <= 0) throw DomainError("log of non-positive integer");
  unsigned msb = boost::multiprecision::msb(x);
  if (msb < 900) return std::log(static_cast<double>(x));
  unsigned shift = msb - 60;
  BigInt top = x >> shift;
  return std::log(static_cast<double>(top)) + shift * std::log(2.0);
}

std::pair<int, int> t_ladder(double h, double rho) {
  if (!(h > 0 && h < 1)) throw DomainError("t_ladder: need 0 < h < 1");
  if (!(rho > 0.75 && rho < 1)) throw DomainError("t_ladder: need 3/4 < rho < 1");
  const double v = rho / 4 * std::log(1 / h);
  const double r = std::round(v);
  int T0 = std::abs(v - r) <= 1e-9 * std::max(1.0, v) ? static_cast<int>(r) : static_cast<int>(std::ceil(v));
  if (T0 < 1) T0 = 1;
  return {T0, 4 * T0};
}

LadderParams make_ladder(double h, double rho, const Rational& alpha) {
  if (!(alpha > 0 && alpha < Rational(1, 2))) throw DomainError("alpha must lie in (0, 1/2)");
  auto [T0, T1] = t_ladder(h, rho);
  return {h, rho, alpha, T0, T1};
}

Rational ones_fraction(const Word& w) {
  if (w.letters.empty()) throw DomainError("ones_fraction: empty word");
  long ones = 0;
  for (auto c : w.letters) ones += (c == 1);
  return Rational(ones, static_cast<long>(w.size()));
}

bool is_controlled(const Word& w, const Rational& alpha) { return ones_fraction(w) > alpha; }

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// k ones out of T0 is uncontrolled iff k / T0 <= alpha.
static bool uncontrolled_ones(long k, int T0, const Rational& alpha) {
  return Rational(k, T0) <= alpha;
}

// uncontrolled_ones for every k in 0..T0, so enumeration loops stay in machine integers.
static std::vector<char> uncontrolled_table(int T0, const Rational& alpha) {
  std::vector<char> t(T0 + 1);
  for (int k = 0; k <= T0; ++k) t[k] = uncontrolled_ones(k, T0, alpha);
  return t;
}

static bool blocks_uncontrolled(std::uint32_t bits, int T0, const std::vector<char>& table) {
  const std::uint32_t mask = (1u << T0) - 1;
  for (int b = 0; b < 8; ++b)
    if (!table[__builtin_popcount((bits >> (b * T0)) & mask)]) return false;
  return true;
}

BigInt count_uncontrolled(int T0, const Rational& alpha) {
  if (T0 < 1) throw DomainError("count_uncontrolled: T0 >= 1 required");
  BigInt total = 0;
  for (int k = 0; k <= T0 && uncontrolled_ones(k, T0, alpha); ++k) total += binomial(T0, k);
  return total;
}

BigInt count_uncontrolled_enumerate(int T0, const Rational& alpha) {
  if (T0 < 1 || T0 > 24) throw DomainError("enumeration needs 1 <= T0 <= 24");
  const auto table = uncontrolled_table(T0, alpha);
  std::uint64_t c = 0;
  for (std::uint32_t w = 0; w < (1u << T0); ++w)
    if (table[__builtin_popcount(w)]) ++c;
  return BigInt(c);
}

BigInt count_X(int T0, const Rational& alpha) { return boost::multiprecision::pow(count_uncontrolled(T0, alpha), 8); }

BigInt count_X_meet_in_middle(int T0, const Rational& alpha) {
  if (T0 < 1 || T0 > 12) throw DomainError("meet-in-the-middle needs 1 <= T0 <= 12");
  const std::uint32_t mask = (1u << T0) - 1;
  const auto table = uncontrolled_table(T0, alpha);
  std::uint64_t pairs = 0;
  for (std::uint32_t w = 0; w < (1u << (2 * T0)); ++w)
    if (table[__builtin_popcount(w & mask)] && table[__builtin_popcount(w >> T0)]) ++pairs;
  return boost::multiprecision::pow(BigInt(pairs), 4);
}

bool word_in_X(std::uint32_t bits, int T0, const Rational& alpha) {
  return blocks_uncontrolled(bits, T0, uncontrolled_table(T0, alpha));
}

XYSplit split_XY(int T0, const Rational& alpha, bool keep_y) {
  if (T0 < 1 || T0 > 3) throw DomainError("split_XY: enumeration bound is T0 <= 3");
  XYSplit out;
  const auto table = uncontrolled_table(T0, alpha);
  const std::uint64_t total = 1ull << (8 * T0);
  for (std::uint64_t w = 0; w < total; ++w) {
    auto bits = static_cast<std::uint32_t>(w);
    if (blocks_uncontrolled(bits, T0, table)) {
      out.X.push_back(bits);
    } else {
      ++out.y_count;
      if (keep_y) out.Y.push_back(bits);
    }
  }
  return out;
}

std::vector<BoundRow> bound_check(double rho, const Rational& alpha, const std::vector<double>& hs, double slack) {
  for (size_t i = 1; i < hs.size(); ++i)
    if (!(hs[i] < hs[i - 1])) throw DomainError("bound_check: h ladder must be decreasing");
  const double sa = std::sqrt(to_double(alpha));
  std::vector<BoundRow> rows;
  for (double h : hs) {
    LadderParams p = make_ladder(h, rho, alpha);
    BoundRow r;
    r.h = h;
    r.T0 = p.T0;
    r.count = count_X(p);
    const double L = std::log(1 / h);
    const double lc = log_big(r.count);
    r.ratio = lc / L;
    r.logC = lc - 4 * sa * L;
    r.within = r.ratio <= 4 * sa + slack;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace hyplab
