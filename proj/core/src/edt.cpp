#include "hyplab/porosity.hpp"

#include <limits>

namespace hyplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas (Felzenszwalb-Huttenlocher), skipping infinite sites.
void edt_line(const double* f, double* out, int len, std::vector<int>& v, std::vector<double>& z) {
  v.resize(len);
  z.resize(len + 1);
  int k = -1;
  for (int q = 0; q < len; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s <= z[k] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    if (s <= z[k]) {
      v[k] = q;  // k == 0 and the new parabola dominates everywhere
      z[k + 1] = kInf;
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    for (int q = 0; q < len; ++q) out[q] = kInf;
    return;
  }
  int j = 0;
  for (int q = 0; q < len; ++q) {
    while (z[j + 1] < q) ++j;
    const double d = q - v[j];
    out[q] = d * d + f[v[j]];
  }
}

}  // namespace

std::vector<double> edt_squared(const std::vector<std::uint8_t>& marked, const std::vector<int>& shape) {
  std::size_t total = 1;
  for (int s : shape) total *= static_cast<std::size_t>(s);
  if (marked.size() != total) throw DomainError("edt_squared: mask size mismatch");
  std::vector<double> d(total);
  for (std::size_t i = 0; i < total; ++i) d[i] = marked[i] ? 0.0 : kInf;
  std::vector<double> in, out;
  std::vector<int> v;
  std::vector<double> z;
  std::size_t stride = 1;
  for (std::size_t ax = 0; ax < shape.size(); ++ax) {
    const int len = shape[ax];
    in.resize(len);
    out.resize(len);
    const std::size_t block = stride * len;
    for (std::size_t base = 0; base < total; base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t start = base + off;
        for (int q = 0; q < len; ++q) in[q] = d[start + q * stride];
        edt_line(in.data(), out.data(), len, v, z);
        for (int q = 0; q < len; ++q) d[start + q * stride] = out[q];
      }
    }
    stride = block;
  }
  return d;
}

std::vector<double> edt_squared_brute(const std::vector<std::uint8_t>& marked, const std::vector<int>& shape) {
  std::size_t total = 1;
  for (int s : shape) total *= static_cast<std::size_t>(s);
  const int n = static_cast<int>(shape.size());
  auto coords = [&](std::size_t idx) {
    std::vector<long> c(n);
    for (int i = 0; i < n; ++i) {
      c[i] = static_cast<long>(idx % shape[i]);
      idx /= shape[i];
    }
    return c;
  };
  std::vector<std::vector<long>> sites;
  for (std::size_t i = 0; i < total; ++i)
    if (marked[i]) sites.push_back(coords(i));
  std::vector<double> d(total, kInf);
  for (std::size_t i = 0; i < total; ++i) {
    auto c = coords(i);
    for (const auto& s : sites) {
      double acc = 0;
      for (int k = 0; k < n; ++k) acc += double(c[k] - s[k]) * double(c[k] - s[k]);
      if (acc < d[i]) d[i] = acc;
    }
  }
  return d;
}

}  // namespace hyplab
