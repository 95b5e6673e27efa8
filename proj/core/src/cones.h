#pragma once

// Cone arithmetic used by the interior-point solver. Vectors span all rows of
// a program; entries on zero-cone rows are ignored or set to zero.

#include <vector>

#include "phaserelax/conic_ir.h"

namespace phaserelax::detail {

struct BlockRange {
  ConeKind kind;
  int dim;
  int offset;
  int size;
};

std::vector<BlockRange> make_layout(const std::vector<ConeBlock>& cones);

/// Barrier degree: NonNeg dim + #SOC + sum of PSD sides.
int cone_degree(const std::vector<BlockRange>& blocks);

/// v += alpha * e on cone rows.
void add_identity(const std::vector<BlockRange>& blocks, VectorXd& v, double alpha);

/// Smallest "eigenvalue" of v over all cone blocks (+inf if there are none).
double min_eigenvalue(const std::vector<BlockRange>& blocks, const VectorXd& v);

/// Jordan product x o y on cone rows.
VectorXd jordan_product(const std::vector<BlockRange>& blocks, const VectorXd& x,
                        const VectorXd& y);

/// Solves lambda o u = v for u, where lambda is an NT scaled point (diagonal
/// on PSD blocks).
VectorXd jordan_divide(const std::vector<BlockRange>& blocks, const VectorXd& lambda,
                       const VectorXd& v);

/// Largest alpha with lambda + alpha d in K (lambda interior, diagonal on PSD
/// blocks); +inf when unbounded.
double max_step(const std::vector<BlockRange>& blocks, const VectorXd& lambda, const VectorXd& d);

/// Nesterov-Todd scaling W with W z = W^{-T} s = lambda.
class NtScaling {
 public:
  explicit NtScaling(const std::vector<BlockRange>& blocks);

  /// H = I on cone rows.
  void set_identity();
  /// False if s or z is not in the interior.
  bool compute(const VectorXd& s, const VectorXd& z);

  const VectorXd& lambda() const { return lambda_; }

  VectorXd w(const VectorXd& v) const;
  VectorXd wt(const VectorXd& v) const;
  VectorXd winv(const VectorXd& v) const;
  VectorXd winvt(const VectorXd& v) const;
  /// H = W' W and its inverse.
  VectorXd h(const VectorXd& v) const;
  VectorXd hinv(const VectorXd& v) const;

  struct Soc {
    MatrixXd w, winv;
  };
  struct Psd {
    MatrixXd r, rti;  // W v = r' V r,  W^{-T} v = rti' V rti
    MatrixXd f, g;    // H v = f V f,   H^{-1} v = g V g
  };

  const std::vector<BlockRange>& blocks() const { return blocks_; }
  const VectorXd& nonneg_d(int b) const { return nonneg_[b]; }
  const Soc& soc(int b) const { return soc_[b]; }
  const Psd& psd(int b) const { return psd_[b]; }

 private:
  std::vector<BlockRange> blocks_;
  std::vector<VectorXd> nonneg_;  // W = diag(d)
  std::vector<Soc> soc_;
  std::vector<Psd> psd_;
  VectorXd lambda_;
};

/// Congruence V -> l' V r on an svec vector: svec(l' smat(v) r), r = l when
/// symmetric output is expected.
VectorXd congruence(const MatrixXd& l, const VectorXd& v, bool transpose_left);

}  // namespace phaserelax::detail
