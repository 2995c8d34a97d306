#include "hyplab/porosity.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hyplab {

namespace {

constexpr std::size_t kMaxCells = std::size_t{1} << 26;

std::size_t checked_cells(int n, int m) {
  if (n < 1 || n > 3) throw DomainError("BoxSet: dimension must be 1..3");
  if (m < 1) throw DomainError("BoxSet: need at least one cell per axis");
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    total *= static_cast<std::size_t>(m);
    if (total > kMaxCells) throw DomainError("BoxSet: resolution overflow");
  }
  return total;
}

}  // namespace

void CantorSpec::validate(int n) const {
  if (base < 3) throw DomainError("CantorSpec: base must be >= 3");
  if (depth < 1) throw DomainError("CantorSpec: depth must be >= 1");
  if (digits.empty() || (digits.size() != 1 && static_cast<int>(digits.size()) != n))
    throw DomainError("CantorSpec: need one digit set or one per axis");
  for (const auto& d : digits) {
    std::set<int> s(d.begin(), d.end());
    if (s.size() != d.size()) throw DomainError("CantorSpec: repeated digit");
    if (s.empty() || static_cast<int>(s.size()) >= base)
      throw DomainError("CantorSpec: kept digits must be a nonempty proper subset");
    for (int v : s)
      if (v < 0 || v >= base) throw DomainError("CantorSpec: digit out of range");
  }
}

const std::vector<int>& CantorSpec::axis_digits(int axis) const {
  return digits.size() == 1 ? digits[0] : digits.at(axis);
}

std::size_t BoxSet::occupied() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1)); }

std::size_t BoxSet::index(const std::vector<int>& c) const {
  std::size_t idx = 0, stride = 1;
  for (int i = 0; i < n; ++i) {
    if (c[i] < 0 || c[i] >= m) throw DomainError("BoxSet: cell index out of range");
    idx += stride * static_cast<std::size_t>(c[i]);
    stride *= static_cast<std::size_t>(m);
  }
  return idx;
}

std::vector<int> BoxSet::coords(std::size_t idx) const {
  std::vector<int> c(n);
  for (int i = 0; i < n; ++i) {
    c[i] = static_cast<int>(idx % m);
    idx /= m;
  }
  return c;
}

bool BoxSet::at(const std::vector<int>& c) const { return mask[index(c)] != 0; }
void BoxSet::set(const std::vector<int>& c, bool v) { mask[index(c)] = v ? 1 : 0; }

Vec BoxSet::cell_center(std::size_t idx) const {
  auto c = coords(idx);
  Vec p(n);
  for (int i = 0; i < n; ++i) p[i] = (c[i] + 0.5) / m;
  return p;
}

bool BoxSet::subset_of(const BoxSet& o) const {
  if (n != o.n || m != o.m) throw DomainError("subset_of: grids differ");
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] && !o.mask[i]) return false;
  return true;
}

BoxSet BoxSet::make_empty(int n, int m) {
  BoxSet b;
  b.n = n;
  b.m = m;
  b.mask.assign(checked_cells(n, m), 0);
  return b;
}

BoxSet BoxSet::make_full(int n, int m) {
  BoxSet b = make_empty(n, m);
  std::fill(b.mask.begin(), b.mask.end(), 1);
  return b;
}

BoxSet BoxSet::from_boxes(int n, int m, const std::vector<std::pair<Vec, Vec>>& boxes) {
  BoxSet b = make_empty(n, m);
  for (const auto& [lo, hi] : boxes) {
    if (lo.size() != n || hi.size() != n) throw DomainError("from_boxes: box dimension mismatch");
    std::vector<int> c0(n), c1(n);
    bool nonempty = true;
    for (int i = 0; i < n; ++i) {
      if (hi[i] < lo[i]) throw DomainError("from_boxes: inverted box");
      c0[i] = std::max(0, static_cast<int>(std::floor(lo[i] * m + 1e-9)));
      c1[i] = std::min(m - 1, static_cast<int>(std::ceil(hi[i] * m - 1e-9)) - 1);
      // Degenerate boxes still mark the cell that contains them.
      if (c1[i] < c0[i]) c1[i] = c0[i] = std::clamp(static_cast<int>(std::floor(lo[i] * m)), 0, m - 1);
      if (lo[i] > 1 || hi[i] < 0) nonempty = false;
    }
    if (!nonempty) continue;
    std::vector<int> c = c0;
    while (true) {
      b.set(c);
      int ax = 0;
      while (ax < n && ++c[ax] > c1[ax]) {
        c[ax] = c0[ax];
        ++ax;
      }
      if (ax == n) break;
    }
  }
  return b;
}

BoxSet cantor_generate(const CantorSpec& spec, int n) {
  spec.validate(n);
  long long m = 1;
  for (int k = 0; k < spec.depth; ++k) {
    m *= spec.base;
    if (m > (1 << 26)) throw DomainError("cantor_generate: resolution overflow");
  }
  BoxSet b = BoxSet::make_empty(n, static_cast<int>(m));
  b.cantor = spec;
  std::vector<std::vector<std::uint8_t>> keep(n, std::vector<std::uint8_t>(m, 0));
  for (int ax = 0; ax < n; ++ax) {
    std::vector<std::uint8_t> ok(spec.base, 0);
    for (int d : spec.axis_digits(ax)) ok[d] = 1;
    for (long long c = 0; c < m; ++c) {
      long long v = c;
      bool good = true;
      for (int k = 0; k < spec.depth && good; ++k) {
        good = ok[v % spec.base];
        v /= spec.base;
      }
      keep[ax][c] = good;
    }
  }
  for (std::size_t idx = 0; idx < b.mask.size(); ++idx) {
    std::size_t r = idx;
    bool good = true;
    for (int ax = 0; ax < n && good; ++ax) {
      good = keep[ax][r % m];
      r /= m;
    }
    b.mask[idx] = good;
  }
  return b;
}

BoxSet refine(const BoxSet& x, int factor) {
  if (factor < 1) throw DomainError("refine: factor must be positive");
  BoxSet r = BoxSet::make_empty(x.n, x.m * factor);
  for (std::size_t idx = 0; idx < r.mask.size(); ++idx) {
    auto c = r.coords(idx);
    for (auto& v : c) v /= factor;
    r.mask[idx] = x.mask[x.index(c)];
  }
  return r;
}

BoxSet restrict_to_box(const BoxSet& x, const Vec& lo, const Vec& hi) {
  BoxSet r = x;
  r.cantor.reset();
  for (std::size_t idx = 0; idx < r.mask.size(); ++idx) {
    if (!r.mask[idx]) continue;
    auto c = r.coords(idx);
    for (int i = 0; i < x.n; ++i)
      if (c[i] * x.delta() < lo[i] - 1e-12 || (c[i] + 1) * x.delta() > hi[i] + 1e-12) r.mask[idx] = 0;
  }
  return r;
}

}  // namespace hyplab
