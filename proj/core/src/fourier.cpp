#include "hyplab/fup.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace hyplab {

namespace {
// The FFTW planner is not thread safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct FourierCore::Plans {
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

bool is_three_smooth(int N) {
  if (N < 1) return false;
  while (N % 2 == 0) N /= 2;
  while (N % 3 == 0) N /= 3;
  return N == 1;
}

FourierCore::FourierCore(int N, int n) : N_(N), n_(n), plans_(std::make_unique<Plans>()) {
  if (n < 1 || n > 3) throw DomainError("FourierCore: dimension must be 1..3");
  if (N < 2 || !is_three_smooth(N)) throw DomainError("FourierCore: unsupported N (need a 3-smooth size >= 2)");
  size_ = 1;
  for (int i = 0; i < n; ++i) size_ *= N;
  std::vector<int> dims(n, N);
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->buf = fftw_alloc_complex(size_);
  plans_->fwd = fftw_plan_dft(n, dims.data(), plans_->buf, plans_->buf, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->bwd = fftw_plan_dft(n, dims.data(), plans_->buf, plans_->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plans_->fwd || !plans_->bwd) throw CertificationError("FourierCore: FFTW planning failed");
}

FourierCore::~FourierCore() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plans_->fwd) fftw_destroy_plan(plans_->fwd);
  if (plans_->bwd) fftw_destroy_plan(plans_->bwd);
  if (plans_->buf) fftw_free(plans_->buf);
}

static void run(fftw_plan p, fftw_complex* buf, Eigen::Index size, const CVec& in, CVec& out) {
  if (in.size() != size) throw DomainError("FourierCore: vector size mismatch");
  auto* c = reinterpret_cast<Complex*>(buf);
  for (Eigen::Index i = 0; i < size; ++i) c[i] = in[i];
  fftw_execute(p);
  out.resize(size);
  const double s = 1.0 / std::sqrt(static_cast<double>(size));
  for (Eigen::Index i = 0; i < size; ++i) out[i] = c[i] * s;
}

void FourierCore::apply(const CVec& in, CVec& out) const { run(plans_->fwd, plans_->buf, size_, in, out); }
void FourierCore::adjoint(const CVec& in, CVec& out) const { run(plans_->bwd, plans_->buf, size_, in, out); }

CMat FourierCore::dense() const {
  CMat f1(N_, N_);
  for (int j = 0; j < N_; ++j)
    for (int k = 0; k < N_; ++k) {
      const long jk = (static_cast<long>(j) * k) % N_;
      f1(j, k) = std::polar(1.0 / std::sqrt(double(N_)), -2 * M_PI * double(jk) / N_);
    }
  CMat f = f1;
  for (int d = 1; d < n_; ++d) {
    // Index = sum c_i N^i: the new axis is the slow one.
    CMat g(f.rows() * N_, f.cols() * N_);
    for (int a = 0; a < N_; ++a)
      for (int b = 0; b < N_; ++b) g.block(a * f.rows(), b * f.cols(), f.rows(), f.cols()) = f1(a, b) * f;
    f = std::move(g);
  }
  return f;
}

}  // namespace hyplab
