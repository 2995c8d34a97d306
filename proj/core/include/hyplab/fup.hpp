#pragma once

// Masked operator norms for discretized Fourier and oscillatory-kernel operators.

#include "hyplab/common.hpp"
#include "hyplab/porosity.hpp"

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hyplab {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

class LinearCore {
 public:
  virtual ~LinearCore() = default;
  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;
  virtual void apply(const CVec& in, CVec& out) const = 0;
  virtual void adjoint(const CVec& in, CVec& out) const = 0;
  virtual CMat dense() const = 0;
};

// Unitary DFT on N^n points, kernel exp(-2 pi i <j,k>/N) N^{-n/2}.  This is the
// semiclassical Fourier transform with h = 1/N.  Instances are not reentrant.
class FourierCore : public LinearCore {
 public:
  FourierCore(int N, int n);
  ~FourierCore() override;
  FourierCore(const FourierCore&) = delete;
  FourierCore& operator=(const FourierCore&) = delete;

  Eigen::Index rows() const override { return size_; }
  Eigen::Index cols() const override { return size_; }
  void apply(const CVec& in, CVec& out) const override;
  void adjoint(const CVec& in, CVec& out) const override;
  CMat dense() const override;
  int N() const { return N_; }
  int dim() const { return n_; }

 private:
  struct Plans;
  int N_;
  int n_;
  Eigen::Index size_;
  std::unique_ptr<Plans> plans_;
};

bool is_three_smooth(int N);

class DenseCore : public LinearCore {
 public:
  explicit DenseCore(CMat k) : k_(std::move(k)) {}
  Eigen::Index rows() const override { return k_.rows(); }
  Eigen::Index cols() const override { return k_.cols(); }
  void apply(const CVec& in, CVec& out) const override { out = k_ * in; }
  void adjoint(const CVec& in, CVec& out) const override { out = k_.adjoint() * in; }
  CMat dense() const override { return k_; }
  const CMat& matrix() const { return k_; }

 private:
  CMat k_;
};

// 1_{left} core 1_{right}, acting on vectors indexed by the right index set.
class MaskedOperator {
 public:
  MaskedOperator(const LinearCore& core, std::vector<Eigen::Index> left, std::vector<Eigen::Index> right);
  Eigen::Index in_size() const { return static_cast<Eigen::Index>(right_.size()); }
  Eigen::Index out_size() const { return static_cast<Eigen::Index>(left_.size()); }
  void apply(const CVec& in, CVec& out) const;
  void adjoint(const CVec& in, CVec& out) const;
  void normal(const CVec& in, CVec& out) const;
  CMat dense() const;
  Eigen::Index core_size() const { return core_.rows(); }

 private:
  const LinearCore& core_;
  std::vector<Eigen::Index> left_, right_;
  mutable CVec buf_in_, buf_out_;
};

std::vector<Eigen::Index> mask_indices(const BoxSet& x);

struct PowerOptions {
  double tol = 1e-8;
  int max_iter = 0;  // 0: ten times the core size, at least 500
  int restarts = 3;
  std::uint64_t seed = 0x5eed;
};

struct NormEstimate {
  double norm = 0;       // best lower bound found (Rayleigh quotient)
  double upper = 0;      // lower bound plus the geometric tail estimate
  int iters = 0;
  bool converged = false;
};

NormEstimate power_norm(const MaskedOperator& op, const PowerOptions& opt = {});
double dense_norm(const MaskedOperator& op);
double dense_norm(const CMat& a);

// Fourier core between two masks at resolution 1/N (masks must have m == N).
NormEstimate masked_norm(const BoxSet& xminus, const BoxSet& xplus, const PowerOptions& opt = {});

struct DecayFit {
  std::vector<std::pair<double, double>> samples;  // (h, norm)
  double beta = 0;
  double intercept = 0;
  double residual = 0;
};

DecayFit beta_fit(const std::vector<std::pair<double, double>>& samples);

using PhaseFn = std::function<double(const Vec&, const Vec&)>;
using AmplitudeFn = std::function<Complex(const Vec&, const Vec&)>;

// K_ij = h^{-n/2} exp(i Phi(x_i, y_j)/h) b(x_i, y_j) dy.
DenseCore general_phase_fio(const PhaseFn& phase, const AmplitudeFn& amp, const std::vector<Vec>& xs,
                            const std::vector<Vec>& ys, double h, double dy);

// Grid {j/N} in [0,1)^n, axis 0 fastest.
std::vector<Vec> unit_grid(int N, int n);
std::vector<Vec> select_points(const std::vector<Vec>& pts, const std::vector<Eigen::Index>& idx);

// Quadrature point sets on S^1 (uniform angles) and S^2 (Fibonacci, equal weight).
struct SphereGrid {
  int n = 1;
  std::vector<Vec> points;
  double weight = 0;
};
SphereGrid sphere_grid(int n, int count);

using CutoffFn = std::function<double(const Vec&, const Vec&)>;

// Smooth cutoff in the chordal distance, 0 below d0 and 1 above d1.
CutoffFn separated_cutoff(double d0, double d1);

// (2 pi h)^{-n/2} (|y - y'|/2)^{2 i w / h} chi(y, y') dy' between two point lists.
// Throws if chi is nonzero on a pair closer than diag_margin.
DenseCore log_phase_kernel(double w, double h, const CutoffFn& chi, const std::vector<Vec>& ys,
                           const std::vector<Vec>& yps, int n, double dy, double diag_margin = 1e-3);

// ---- experiment driver ----

enum class CoreKind { Fourier, GeneralPhase, LogPhase };
const char* core_kind_name(CoreKind c);

struct FupConfig {
  CoreKind core = CoreKind::Fourier;
  int n = 1;
  bool full_masks = false;
  CantorSpec cantor{3, {{0, 2}}, 1};
  std::vector<int> depths;            // N = base^depth (Fourier, general phase); h = base^{-depth} (log phase)
  std::optional<double> rho;          // mask thickening X(h^rho)
  bool lower_bound_check = false;
  double quadratic = 0.1;             // general phase: Phi = -2 pi <x,y> + quadratic |y|^2
  double w = 1.0;                     // log phase
  int sphere_points = 4096;
  double arc_length = M_PI / 2;
  double arc_separation = 2 * M_PI / 3;
  int dense_limit = 4096;
  PowerOptions power;
};

struct FupRow {
  CoreKind core = CoreKind::Fourier;
  int n = 1;
  long N = 0;
  double h = 0;
  double rho = 0;
  double norm = 0;
  int iters = 0;
  bool converged = false;
  double dense = -1;  // dense cross-check value, negative when skipped
};

struct FupResult {
  std::vector<FupRow> rows;
  DecayFit fit;
  bool sanity_ok = true;
  std::vector<std::string> messages;
};

FupResult fup_experiment(const FupConfig& cfg);

// Mask on the S^1 grid: angles in an arc of given length starting at offset, whose
// arc-relative position lies in the depth-k Cantor set.
std::vector<std::uint8_t> arc_cantor_mask(const SphereGrid& g, double offset, double length, const CantorSpec& spec,
                                          int depth);

}  // namespace hyplab
