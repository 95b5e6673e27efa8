#include "phaserelax/conic_ir.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace phaserelax {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

std::string Symbol::str() const {
  std::string out = name;
  if (i >= 0) {
    out += "[" + std::to_string(i + 1);
    if (j >= 0) out += "," + std::to_string(j + 1);
    out += "]";
  }
  return out;
}

const char* cone_name(ConeKind k) {
  switch (k) {
    case ConeKind::kZero:
      return "zero";
    case ConeKind::kNonNeg:
      return "nonneg";
    case ConeKind::kSoc:
      return "soc";
    case ConeKind::kPsd:
      return "psd";
  }
  return "?";
}

VectorXd svec(const MatrixXd& m) {
  const int side = static_cast<int>(m.rows());
  VectorXd v(side * (side + 1) / 2);
  int t = 0;
  for (int c = 0; c < side; ++c) {
    for (int r = c; r < side; ++r) v(t++) = (r == c) ? m(r, c) : kSqrt2 * 0.5 * (m(r, c) + m(c, r));
  }
  return v;
}

MatrixXd smat(const VectorXd& v, int side) {
  MatrixXd m(side, side);
  int t = 0;
  for (int c = 0; c < side; ++c) {
    for (int r = c; r < side; ++r) {
      const double val = (r == c) ? v(t) : v(t) / kSqrt2;
      m(r, c) = val;
      m(c, r) = val;
      ++t;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// ConicProgram

int ConicProgram::column(const Symbol& s) const {
  const auto it = std::lower_bound(varmap.begin(), varmap.end(), s);
  if (it == varmap.end() || *it != s) throw Error("unknown symbol " + s.str());
  return static_cast<int>(it - varmap.begin());
}

bool ConicProgram::has(const Symbol& s) const {
  return std::binary_search(varmap.begin(), varmap.end(), s);
}

double ConicProgram::max_violation(const VectorXd& x) const {
  const VectorXd s = b - a * x;
  double worst = 0.0;
  int off = 0;
  for (const auto& blk : cones) {
    const int sz = blk.size();
    const auto seg = s.segment(off, sz);
    switch (blk.kind) {
      case ConeKind::kZero:
        worst = std::max(worst, seg.cwiseAbs().maxCoeff());
        break;
      case ConeKind::kNonNeg:
        worst = std::max(worst, -seg.minCoeff());
        break;
      case ConeKind::kSoc:
        worst = std::max(worst, seg.tail(sz - 1).norm() - seg(0));
        break;
      case ConeKind::kPsd: {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(smat(seg, blk.dim), Eigen::EigenvaluesOnly);
        worst = std::max(worst, -es.eigenvalues().minCoeff());
        break;
      }
    }
    off += sz;
  }
  return worst;
}

void ConicProgram::check_dimensions() const {
  const int total = std::accumulate(cones.begin(), cones.end(), 0,
                                    [](int acc, const ConeBlock& blk) { return acc + blk.size(); });
  if (a.rows() != b.size() || a.cols() != c.size() || total != b.size()) {
    throw Error("conic program dimension mismatch");
  }
  if (static_cast<int>(varmap.size()) != c.size()) throw Error("varmap does not cover all columns");
  for (const auto& blk : cones) {
    if (blk.dim < 1) throw Error("cone block with dimension < 1");
  }
}

nlohmann::json to_json(const ConicProgram& prog) {
  using nlohmann::json;
  json entries = json::array();
  for (int r = 0; r < prog.a.rows(); ++r) {
    for (int k = 0; k < prog.a.cols(); ++k) {
      if (prog.a(r, k) != 0.0) entries.push_back({r, k, prog.a(r, k)});
    }
  }
  json cones = json::array();
  for (const auto& blk : prog.cones) cones.push_back({{"type", cone_name(blk.kind)}, {"dim", blk.dim}});
  json vars = json::array();
  for (const auto& s : prog.varmap) vars.push_back(s.str());
  return json{{"c", std::vector<double>(prog.c.data(), prog.c.data() + prog.c.size())},
              {"b", std::vector<double>(prog.b.data(), prog.b.data() + prog.b.size())},
              {"A", {{"rows", prog.a.rows()}, {"cols", prog.a.cols()}, {"entries", entries}}},
              {"cones", cones},
              {"variables", vars},
              {"row_labels", prog.row_labels},
              {"objective_scale", prog.objective_scale},
              {"objective_offset", prog.objective_offset}};
}

// ---------------------------------------------------------------------------
// LinearExpr

LinearExpr& LinearExpr::operator+=(const LinearExpr& o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  constant += o.constant;
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& o) {
  for (const auto& [k, v] : o.terms) terms.push_back({k, -v});
  constant -= o.constant;
  return *this;
}

LinearExpr& LinearExpr::operator*=(double k) {
  for (auto& t : terms) t.second *= k;
  constant *= k;
  return *this;
}

// ---------------------------------------------------------------------------
// HermitianVar

LinearExpr HermitianVar::re(int i, int j) const { return LinearExpr::var(re_index[i * n + j]); }

LinearExpr HermitianVar::im(int i, int j) const {
  if (i == j) return LinearExpr();
  return LinearExpr::var(im_index[i * n + j], i < j ? 1.0 : -1.0);
}

LinearExpr HermitianVar::inner(const HermitianMatrix& q) const {
  if (q.n() != n) throw Error("inner product dimension mismatch");
  LinearExpr e;
  for (int i = 0; i < n; ++i) {
    if (q(i, i).real() != 0.0) e += q(i, i).real() * re(i, i);
    for (int j = i + 1; j < n; ++j) {
      const Complex v = q(i, j);
      if (v.real() != 0.0) e += 2.0 * v.real() * re(i, j);
      if (v.imag() != 0.0) e += 2.0 * v.imag() * im(i, j);
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// ProgramBuilder

int ProgramBuilder::add_variable(const Symbol& s) {
  if (index_.count(s)) throw Error("duplicate symbol " + s.str());
  const int k = static_cast<int>(symbols_.size());
  symbols_.push_back(s);
  index_.emplace(s, k);
  return k;
}

int ProgramBuilder::index_of(const Symbol& s) const {
  const auto it = index_.find(s);
  if (it == index_.end()) throw Error("unknown symbol " + s.str());
  return it->second;
}

HermitianVar ProgramBuilder::add_hermitian(const std::string& name, int n) {
  if (n < 1) throw Error("Hermitian variable needs n >= 1");
  HermitianVar x;
  x.name = name;
  x.n = n;
  x.re_index.assign(n * n, -1);
  x.im_index.assign(n * n, -1);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const int k = add_variable({name + ".re", i, j});
      x.re_index[i * n + j] = x.re_index[j * n + i] = k;
      if (j > i) {
        const int t = add_variable({name + ".im", i, j});
        x.im_index[i * n + j] = x.im_index[j * n + i] = t;
      }
    }
  }
  return x;
}

void ProgramBuilder::add_zero(const LinearExpr& e, const std::string& label) {
  zero_rows_.push_back({e, label});
}

void ProgramBuilder::add_nonneg(const LinearExpr& e, const std::string& label) {
  nonneg_rows_.push_back({e, label});
}

void ProgramBuilder::add_soc(const std::vector<LinearExpr>& e, const std::string& label) {
  if (e.empty()) throw Error("empty SOC block");
  Block blk{ConeKind::kSoc, static_cast<int>(e.size()), {}};
  for (size_t k = 0; k < e.size(); ++k) blk.rows.push_back({e[k], label + "[" + std::to_string(k) + "]"});
  blocks_.push_back(std::move(blk));
}

void ProgramBuilder::add_psd(int side, const std::vector<LinearExpr>& lower,
                             const std::string& label) {
  if (side < 1 || static_cast<int>(lower.size()) != side * (side + 1) / 2) {
    throw Error("PSD block dimension mismatch");
  }
  Block blk{ConeKind::kPsd, side, {}};
  int t = 0;
  for (int c = 0; c < side; ++c) {
    for (int r = c; r < side; ++r) {
      LinearExpr e = lower[t++];
      if (r != c) e *= kSqrt2;
      blk.rows.push_back(
          {std::move(e), label + "(" + std::to_string(r + 1) + "," + std::to_string(c + 1) + ")"});
    }
  }
  blocks_.push_back(std::move(blk));
}

void ProgramBuilder::add_psd(const HermitianVar& x, const std::string& label) {
  const int n = x.n;
  const int side = 2 * n;
  std::vector<LinearExpr> lower;
  lower.reserve(side * (side + 1) / 2);
  for (int c = 0; c < side; ++c) {
    for (int r = c; r < side; ++r) {
      if (c >= n) {
        lower.push_back(x.re(r - n, c - n));
      } else if (r < n) {
        lower.push_back(x.re(r, c));
      } else {
        lower.push_back(x.im(r - n, c));
      }
    }
  }
  add_psd(side, lower, label);
}

void ProgramBuilder::set_objective(const LinearExpr& e, double scale) {
  objective_ = e;
  objective_scale_ = scale;
}

ConicProgram ProgramBuilder::assemble() const {
  const int nv = num_variables();
  std::vector<int> order(nv);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return symbols_[a] < symbols_[b]; });
  std::vector<int> column(nv);
  ConicProgram prog;
  prog.varmap.resize(nv);
  for (int k = 0; k < nv; ++k) {
    column[order[k]] = k;
    prog.varmap[k] = symbols_[order[k]];
  }

  std::vector<const Row*> rows;
  auto push_block = [&](ConeKind kind, int dim, const std::vector<Row>& rs) {
    if (rs.empty()) return;
    prog.cones.push_back({kind, dim});
    for (const auto& r : rs) rows.push_back(&r);
  };
  push_block(ConeKind::kZero, static_cast<int>(zero_rows_.size()), zero_rows_);
  push_block(ConeKind::kNonNeg, static_cast<int>(nonneg_rows_.size()), nonneg_rows_);
  for (const auto& blk : blocks_) {
    if (blk.kind == ConeKind::kSoc) push_block(blk.kind, blk.dim, blk.rows);
  }
  for (const auto& blk : blocks_) {
    if (blk.kind == ConeKind::kPsd) push_block(blk.kind, blk.dim, blk.rows);
  }

  const int m = static_cast<int>(rows.size());
  prog.a = MatrixXd::Zero(m, nv);
  prog.b = VectorXd::Zero(m);
  prog.row_labels.reserve(m);
  for (int r = 0; r < m; ++r) {
    // s = e(x) = sum a_k x_k + k0  <=>  A x + s = b with A = -a, b = k0
    for (const auto& [k, v] : rows[r]->e.terms) {
      if (k < 0 || k >= nv) throw Error("unknown symbol in constraint " + rows[r]->label);
      prog.a(r, column[k]) -= v;
    }
    prog.b(r) = rows[r]->e.constant;
    prog.row_labels.push_back(rows[r]->label);
  }

  prog.c = VectorXd::Zero(nv);
  for (const auto& [k, v] : objective_.terms) {
    if (k < 0 || k >= nv) throw Error("unknown symbol in objective");
    prog.c(column[k]) += v;
  }
  prog.objective_scale = objective_scale_;
  prog.objective_offset = objective_scale_ * objective_.constant;
  prog.check_dimensions();
  return prog;
}

// ---------------------------------------------------------------------------
// Recovery

HermitianMatrix recover_complex(const ConicProgram& prog, const VectorXd& x,
                                const std::string& name, int n) {
  MatrixXcd m = MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double w = x(prog.column({name + ".re", i, j}));
      const double t = j > i ? x(prog.column({name + ".im", i, j})) : 0.0;
      m(i, j) = Complex(w, t);
      m(j, i) = Complex(w, -t);
    }
  }
  return HermitianMatrix(m);
}

HermitianMatrix recover_complex(const MatrixXd& y) {
  if (y.rows() != y.cols() || y.rows() % 2 != 0) throw Error("embedding must be 2n x 2n");
  const int n = static_cast<int>(y.rows() / 2);
  MatrixXd w = 0.5 * (y.topLeftCorner(n, n) + y.bottomRightCorner(n, n));
  w = 0.5 * (w + w.transpose()).eval();
  MatrixXd t = 0.5 * (y.bottomLeftCorner(n, n) - y.topRightCorner(n, n));
  t = 0.5 * (t - t.transpose()).eval();
  return HermitianMatrix(w, t);
}

MatrixXd real_embedding(const MatrixXcd& x) {
  const int n = static_cast<int>(x.rows());
  MatrixXd y(2 * n, 2 * n);
  y.topLeftCorner(n, n) = x.real();
  y.bottomRightCorner(n, n) = x.real();
  y.topRightCorner(n, n) = -x.imag();
  y.bottomLeftCorner(n, n) = x.imag();
  return y;
}

}  // namespace phaserelax
