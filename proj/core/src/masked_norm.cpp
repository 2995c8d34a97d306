#include "hyplab/fup.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace hyplab {

MaskedOperator::MaskedOperator(const LinearCore& core, std::vector<Eigen::Index> left, std::vector<Eigen::Index> right)
    : core_(core), left_(std::move(left)), right_(std::move(right)) {
  for (auto i : left_)
    if (i < 0 || i >= core_.rows()) throw DomainError("MaskedOperator: left index out of range");
  for (auto i : right_)
    if (i < 0 || i >= core_.cols()) throw DomainError("MaskedOperator: right index out of range");
}

void MaskedOperator::apply(const CVec& in, CVec& out) const {
  buf_in_.setZero(core_.cols());
  for (std::size_t k = 0; k < right_.size(); ++k) buf_in_[right_[k]] = in[k];
  core_.apply(buf_in_, buf_out_);
  out.resize(out_size());
  for (std::size_t k = 0; k < left_.size(); ++k) out[k] = buf_out_[left_[k]];
}

void MaskedOperator::adjoint(const CVec& in, CVec& out) const {
  buf_in_.setZero(core_.rows());
  for (std::size_t k = 0; k < left_.size(); ++k) buf_in_[left_[k]] = in[k];
  core_.adjoint(buf_in_, buf_out_);
  out.resize(in_size());
  for (std::size_t k = 0; k < right_.size(); ++k) out[k] = buf_out_[right_[k]];
}

void MaskedOperator::normal(const CVec& in, CVec& out) const {
  CVec mid;
  apply(in, mid);
  adjoint(mid, out);
}

CMat MaskedOperator::dense() const {
  CMat full = core_.dense();
  CMat out(left_.size(), right_.size());
  for (std::size_t a = 0; a < left_.size(); ++a)
    for (std::size_t b = 0; b < right_.size(); ++b) out(a, b) = full(left_[a], right_[b]);
  return out;
}

std::vector<Eigen::Index> mask_indices(const BoxSet& x) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < x.mask.size(); ++i)
    if (x.mask[i]) idx.push_back(static_cast<Eigen::Index>(i));
  return idx;
}

NormEstimate power_norm(const MaskedOperator& op, const PowerOptions& opt) {
  NormEstimate best;
  const Eigen::Index dim = op.in_size();
  if (dim == 0 || op.out_size() == 0) {
    best.converged = true;
    return best;
  }
  const int cap = opt.max_iter > 0 ? opt.max_iter : static_cast<int>(std::max<Eigen::Index>(500, 10 * op.core_size()));
  Rng rng(opt.seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  bool all_converged = true;
  double best_rho = -1, best_tail = 0;
  CVec v(dim), w;
  for (int r = 0; r < std::max(1, opt.restarts); ++r) {
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(nd(rng), nd(rng));
    v /= v.norm();
    double prev = -1, prev_delta = -1, rho = 0, tail = 0;
    bool conv = false;
    for (int it = 1; it <= cap; ++it) {
      ++best.iters;
      op.normal(v, w);
      rho = v.dot(w).real();
      const double wn = w.norm();
      if (wn == 0) {
        rho = 0;
        tail = 0;
        conv = true;
        break;
      }
      if (prev >= 0) {
        const double delta = rho - prev;
        double ratio = prev_delta > 0 && delta > 0 ? delta / prev_delta : 0.0;
        ratio = std::min(ratio, 1 - 1e-12);
        tail = std::abs(delta) * ratio / (1 - ratio);
        if (std::abs(delta) <= opt.tol * rho && tail <= opt.tol * rho) {
          conv = true;
          prev = rho;
          break;
        }
        prev_delta = delta;
      }
      prev = rho;
      v = w / wn;
    }
    all_converged = all_converged && conv;
    if (rho > best_rho) {
      best_rho = rho;
      best_tail = tail;
    }
  }
  best.norm = std::sqrt(std::max(best_rho, 0.0));
  best.upper = std::sqrt(std::max(best_rho, 0.0) + best_tail);
  best.converged = all_converged;
  return best;
}

double dense_norm(const CMat& a) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<CMat> svd(a);
  return svd.singularValues()(0);
}

double dense_norm(const MaskedOperator& op) { return dense_norm(op.dense()); }

NormEstimate masked_norm(const BoxSet& xminus, const BoxSet& xplus, const PowerOptions& opt) {
  if (xminus.n != xplus.n || xminus.m != xplus.m) throw DomainError("masked_norm: masks on different grids");
  FourierCore core(xminus.m, xminus.n);
  MaskedOperator op(core, mask_indices(xminus), mask_indices(xplus));
  return power_norm(op, opt);
}

DecayFit beta_fit(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 4) throw DomainError("beta_fit: need at least 4 samples");
  DecayFit fit;
  fit.samples = samples;
  double sx = 0, sy = 0;
  const double k = static_cast<double>(samples.size());
  for (const auto& [h, v] : samples) {
    if (!(h > 0) || !(v > 0) || !std::isfinite(v)) throw DomainError("beta_fit: h and norms must be positive");
    sx += std::log(h);
    sy += std::log(v);
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (const auto& [h, v] : samples) {
    const double dx = std::log(h) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  if (!(sxx > 0)) throw DomainError("beta_fit: all samples share one h");
  fit.beta = sxy / sxx;
  fit.intercept = my - fit.beta * mx;
  for (const auto& [h, v] : samples)
    fit.residual = std::max(fit.residual, std::abs(fit.intercept + fit.beta * std::log(h) - std::log(v)));
  return fit;
}

}  // namespace hyplab
