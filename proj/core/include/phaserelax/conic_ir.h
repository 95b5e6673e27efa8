#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phaserelax/model.h"

namespace phaserelax {

/// Named scalar of a program, e.g. ("X.re", 0, 2) or ("t", -1, -1).
struct Symbol {
  std::string name;
  int i = -1;
  int j = -1;

  auto operator<=>(const Symbol&) const = default;
  std::string str() const;
};

enum class ConeKind { kZero, kNonNeg, kSoc, kPsd };

/// One block of the cone K. For PSD blocks `dim` is the matrix side; the
/// slack occupies side(side+1)/2 entries in scaled lower-triangle order
/// (column major, off-diagonals times sqrt 2).
struct ConeBlock {
  ConeKind kind = ConeKind::kZero;
  int dim = 0;

  int size() const { return kind == ConeKind::kPsd ? dim * (dim + 1) / 2 : dim; }
  friend bool operator==(const ConeBlock&, const ConeBlock&) = default;
};

const char* cone_name(ConeKind k);

/// svec index of entry (r, c), r >= c, of a side x side symmetric matrix.
inline int svec_index(int side, int r, int c) { return c * side - c * (c - 1) / 2 + (r - c); }

VectorXd svec(const MatrixXd& m);
MatrixXd smat(const VectorXd& v, int side);

/// minimize c'x + offset  s.t.  A x + s = b,  s in K.
/// Reported objective = objective_scale * (c'x) + objective_offset.
struct ConicProgram {
  VectorXd c;
  MatrixXd a;
  VectorXd b;
  std::vector<ConeBlock> cones;
  std::vector<Symbol> varmap;
  std::vector<std::string> row_labels;
  double objective_scale = 1.0;
  double objective_offset = 0.0;

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(b.size()); }

  /// Column of a symbol; throws for unknown symbols.
  int column(const Symbol& s) const;
  bool has(const Symbol& s) const;

  double reported_objective(const VectorXd& x) const {
    return objective_scale * c.dot(x) + objective_offset;
  }

  /// Largest cone violation of s = b - A x (distance-style, per block).
  double max_violation(const VectorXd& x) const;

  void check_dimensions() const;
};

nlohmann::json to_json(const ConicProgram& prog);

/// Affine function of program variables (builder indices).
struct LinearExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinearExpr() = default;
  explicit LinearExpr(double k) : constant(k) {}
  static LinearExpr var(int index, double coef = 1.0) {
    LinearExpr e;
    e.terms.push_back({index, coef});
    return e;
  }

  LinearExpr& operator+=(const LinearExpr& o);
  LinearExpr& operator-=(const LinearExpr& o);
  LinearExpr& operator*=(double k);
  friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
  friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
  friend LinearExpr operator*(double k, LinearExpr a) { return a *= k; }
  friend LinearExpr operator*(LinearExpr a, double k) { return a *= k; }
};

/// Complex Hermitian n x n variable, parameterized by W_ij = Re X_ij (i <= j)
/// and T_ij = Im X_ij (i < j).
struct HermitianVar {
  std::string name;
  int n = 0;
  std::vector<int> re_index;  // n*n, symmetric lookup
  std::vector<int> im_index;  // n*n, -1 on the diagonal

  LinearExpr re(int i, int j) const;
  LinearExpr im(int i, int j) const;  // antisymmetric
  /// Q . X = Re trace(Q^H X)
  LinearExpr inner(const HermitianMatrix& q) const;
};

class ProgramBuilder {
 public:
  int add_variable(const Symbol& s);
  int index_of(const Symbol& s) const;
  bool has(const Symbol& s) const { return index_.count(s) > 0; }
  LinearExpr ref(const Symbol& s) const { return LinearExpr::var(index_of(s)); }
  int num_variables() const { return static_cast<int>(symbols_.size()); }
  const std::vector<Symbol>& symbols() const { return symbols_; }

  HermitianVar add_hermitian(const std::string& name, int n);

  void add_zero(const LinearExpr& e, const std::string& label);
  void add_nonneg(const LinearExpr& e, const std::string& label);
  /// (e0, e1, ..., ek) with ||(e1..ek)|| <= e0.
  void add_soc(const std::vector<LinearExpr>& e, const std::string& label);
  /// Symmetric matrix given by its lower triangle in svec order (unscaled).
  void add_psd(int side, const std::vector<LinearExpr>& lower, const std::string& label);

  /// [[W, -T], [T, W]] >= 0
  void add_psd(const HermitianVar& x, const std::string& label);

  void set_objective(const LinearExpr& e, double scale = 1.0);

  /// Standard form with columns sorted by symbol and rows grouped by cone
  /// kind (zero, nonneg, then SOC and PSD blocks in insertion order).
  ConicProgram assemble() const;

 private:
  struct Row {
    LinearExpr e;
    std::string label;
  };
  struct Block {
    ConeKind kind;
    int dim;
    std::vector<Row> rows;
  };

  std::vector<Symbol> symbols_;
  std::map<Symbol, int> index_;
  std::vector<Row> zero_rows_;
  std::vector<Row> nonneg_rows_;
  std::vector<Block> blocks_;
  LinearExpr objective_;
  double objective_scale_ = 1.0;
};

/// Hermitian X from the variable values of a program.
HermitianMatrix recover_complex(const ConicProgram& prog, const VectorXd& x,
                                const std::string& name, int n);

/// Hermitian X from a (possibly noisy) real embedding Y of side 2n:
/// W is the mean of the diagonal blocks, T = (Y21 - Y12) / 2.
HermitianMatrix recover_complex(const MatrixXd& y);

/// Real embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix.
MatrixXd real_embedding(const MatrixXcd& x);

}  // namespace phaserelax
