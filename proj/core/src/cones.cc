#include "cones.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace phaserelax::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::sqrt(2.0);

// v[0] - ||v[1:]||
double soc_gap(const Eigen::Ref<const VectorXd>& v) { return v(0) - v.tail(v.size() - 1).norm(); }

// v'Jv
double soc_jdot(const Eigen::Ref<const VectorXd>& v) {
  return v(0) * v(0) - v.tail(v.size() - 1).squaredNorm();
}

// Smallest positive root of a t^2 + b t + c (c > 0), or +inf.
double first_positive_root(double a, double b, double c) {
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale == 0.0) return kInf;
  if (std::abs(a) <= 1e-14 * scale) {
    return b < 0.0 ? -c / b : kInf;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return kInf;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  double best = kInf;
  const double r1 = q / a;
  const double r2 = q != 0.0 ? c / q : kInf;
  if (r1 > 0.0) best = std::min(best, r1);
  if (r2 > 0.0) best = std::min(best, r2);
  return best;
}

}  // namespace

std::vector<BlockRange> make_layout(const std::vector<ConeBlock>& cones) {
  std::vector<BlockRange> out;
  int off = 0;
  for (const auto& c : cones) {
    out.push_back({c.kind, c.dim, off, c.size()});
    off += c.size();
  }
  return out;
}

int cone_degree(const std::vector<BlockRange>& blocks) {
  int deg = 0;
  for (const auto& b : blocks) {
    if (b.kind == ConeKind::kNonNeg || b.kind == ConeKind::kPsd) deg += b.dim;
    if (b.kind == ConeKind::kSoc) deg += 1;
  }
  return deg;
}

void add_identity(const std::vector<BlockRange>& blocks, VectorXd& v, double alpha) {
  for (const auto& b : blocks) {
    switch (b.kind) {
      case ConeKind::kZero:
        break;
      case ConeKind::kNonNeg:
        v.segment(b.offset, b.size).array() += alpha;
        break;
      case ConeKind::kSoc:
        v(b.offset) += alpha;
        break;
      case ConeKind::kPsd:
        for (int c = 0; c < b.dim; ++c) v(b.offset + svec_index(b.dim, c, c)) += alpha;
        break;
    }
  }
}

double min_eigenvalue(const std::vector<BlockRange>& blocks, const VectorXd& v) {
  double m = kInf;
  for (const auto& b : blocks) {
    const auto seg = v.segment(b.offset, b.size);
    switch (b.kind) {
      case ConeKind::kZero:
        break;
      case ConeKind::kNonNeg:
        m = std::min(m, seg.minCoeff());
        break;
      case ConeKind::kSoc:
        m = std::min(m, soc_gap(seg));
        break;
      case ConeKind::kPsd: {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(smat(seg, b.dim), Eigen::EigenvaluesOnly);
        m = std::min(m, es.eigenvalues().minCoeff());
        break;
      }
    }
  }
  return m;
}

VectorXd jordan_product(const std::vector<BlockRange>& blocks, const VectorXd& x,
                        const VectorXd& y) {
  VectorXd out = VectorXd::Zero(x.size());
  for (const auto& b : blocks) {
    const auto xs = x.segment(b.offset, b.size);
    const auto ys = y.segment(b.offset, b.size);
    auto os = out.segment(b.offset, b.size);
    switch (b.kind) {
      case ConeKind::kZero:
        break;
      case ConeKind::kNonNeg:
        os = xs.cwiseProduct(ys);
        break;
      case ConeKind::kSoc:
        os(0) = xs.dot(ys);
        os.tail(b.size - 1) = xs(0) * ys.tail(b.size - 1) + ys(0) * xs.tail(b.size - 1);
        break;
      case ConeKind::kPsd: {
        const MatrixXd xm = smat(xs, b.dim);
        const MatrixXd ym = smat(ys, b.dim);
        const MatrixXd p = xm * ym;
        os = svec(0.5 * (p + p.transpose()));
        break;
      }
    }
  }
  return out;
}

VectorXd jordan_divide(const std::vector<BlockRange>& blocks, const VectorXd& lambda,
                       const VectorXd& v) {
  VectorXd out = VectorXd::Zero(v.size());
  for (const auto& b : blocks) {
    const auto l = lambda.segment(b.offset, b.size);
    const auto vs = v.segment(b.offset, b.size);
    auto os = out.segment(b.offset, b.size);
    switch (b.kind) {
      case ConeKind::kZero:
        break;
      case ConeKind::kNonNeg:
        os = vs.cwiseQuotient(l);
        break;
      case ConeKind::kSoc: {
        const double det = soc_jdot(l);
        const double u0 = (l(0) * vs(0) - l.tail(b.size - 1).dot(vs.tail(b.size - 1))) / det;
        os(0) = u0;
        os.tail(b.size - 1) = (vs.tail(b.size - 1) - u0 * l.tail(b.size - 1)) / l(0);
        break;
      }
      case ConeKind::kPsd: {
        int t = 0;
        for (int c = 0; c < b.dim; ++c) {
          const double lc = l(svec_index(b.dim, c, c));
          for (int r = c; r < b.dim; ++r, ++t) {
            const double lr = l(svec_index(b.dim, r, r));
            os(t) = 2.0 * vs(t) / (lr + lc);
          }
        }
        break;
      }
    }
  }
  return out;
}

double max_step(const std::vector<BlockRange>& blocks, const VectorXd& lambda, const VectorXd& d) {
  double alpha = kInf;
  for (const auto& b : blocks) {
    const auto l = lambda.segment(b.offset, b.size);
    const auto ds = d.segment(b.offset, b.size);
    switch (b.kind) {
      case ConeKind::kZero:
        break;
      case ConeKind::kNonNeg:
        for (int k = 0; k < b.size; ++k) {
          if (ds(k) < 0.0) alpha = std::min(alpha, -l(k) / ds(k));
        }
        break;
      case ConeKind::kSoc: {
        const int n1 = b.size - 1;
        const double qa = soc_jdot(ds);
        const double qb = 2.0 * (l(0) * ds(0) - l.tail(n1).dot(ds.tail(n1)));
        const double qc = soc_jdot(l);
        alpha = std::min(alpha, first_positive_root(qa, qb, qc));
        break;
      }
      case ConeKind::kPsd: {
        VectorXd isq(b.dim);
        for (int c = 0; c < b.dim; ++c) isq(c) = 1.0 / std::sqrt(l(svec_index(b.dim, c, c)));
        MatrixXd dm = smat(ds, b.dim);
        dm = isq.asDiagonal() * dm * isq.asDiagonal();
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(dm, Eigen::EigenvaluesOnly);
        const double emin = es.eigenvalues().minCoeff();
        if (emin < 0.0) alpha = std::min(alpha, -1.0 / emin);
        break;
      }
    }
  }
  return alpha;
}

VectorXd congruence(const MatrixXd& l, const VectorXd& v, bool transpose_left) {
  const int side = static_cast<int>(l.rows());
  const MatrixXd vm = smat(v, side);
  if (transpose_left) return svec(l.transpose() * vm * l);
  return svec(l * vm * l.transpose());
}

// ---------------------------------------------------------------------------
// NtScaling

NtScaling::NtScaling(const std::vector<BlockRange>& blocks) : blocks_(blocks) {
  int m = 0;
  for (const auto& b : blocks_) {
    m += b.size;
    if (b.kind == ConeKind::kNonNeg) nonneg_.emplace_back();
    if (b.kind == ConeKind::kSoc) soc_.emplace_back();
    if (b.kind == ConeKind::kPsd) psd_.emplace_back();
  }
  lambda_ = VectorXd::Zero(m);
  set_identity();
}

void NtScaling::set_identity() {
  int in = 0, is = 0, ip = 0;
  lambda_.setZero();
  for (const auto& b : blocks_) {
    switch (b.kind) {
      case ConeKind::kZero:
        break;
      case ConeKind::kNonNeg:
        nonneg_[in++] = VectorXd::Ones(b.size);
        break;
      case ConeKind::kSoc:
        soc_[is].w = MatrixXd::Identity(b.size, b.size);
        soc_[is].winv = soc_[is].w;
        ++is;
        break;
      case ConeKind::kPsd: {
        auto& p = psd_[ip++];
        p.r = p.rti = p.f = p.g = MatrixXd::Identity(b.dim, b.dim);
        break;
      }
    }
  }
  add_identity(blocks_, lambda_, 1.0);
}

bool NtScaling::compute(const VectorXd& s, const VectorXd& z) {
  int in = 0, is = 0, ip = 0;
  lambda_.setZero();
  for (const auto& b : blocks_) {
    const auto ss = s.segment(b.offset, b.size);
    const auto zs = z.segment(b.offset, b.size);
    auto ls = lambda_.segment(b.offset, b.size);
    switch (b.kind) {
      case ConeKind::kZero:
        break;
      case ConeKind::kNonNeg: {
        if (ss.minCoeff() <= 0.0 || zs.minCoeff() <= 0.0) return false;
        nonneg_[in] = ss.cwiseQuotient(zs).cwiseSqrt();
        ls = ss.cwiseProduct(zs).cwiseSqrt();
        ++in;
        break;
      }
      case ConeKind::kSoc: {
        const int n1 = b.size - 1;
        const double sj = soc_jdot(ss);
        const double zj = soc_jdot(zs);
        if (ss(0) <= 0.0 || zs(0) <= 0.0 || sj <= 0.0 || zj <= 0.0) return false;
        const VectorXd sb = ss / std::sqrt(sj);
        const VectorXd zb = zs / std::sqrt(zj);
        const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
        VectorXd wb(b.size);
        wb(0) = (sb(0) + zb(0)) / (2.0 * gamma);
        wb.tail(n1) = (sb.tail(n1) - zb.tail(n1)) / (2.0 * gamma);
        const double eta = std::pow(sj / zj, 0.25);
        MatrixXd w(b.size, b.size);
        w(0, 0) = wb(0);
        w.block(0, 1, 1, n1) = wb.tail(n1).transpose();
        w.block(1, 0, n1, 1) = wb.tail(n1);
        w.block(1, 1, n1, n1) = MatrixXd::Identity(n1, n1) +
                                wb.tail(n1) * wb.tail(n1).transpose() / (1.0 + wb(0));
        MatrixXd winv = w;
        winv.block(0, 1, 1, n1) *= -1.0;
        winv.block(1, 0, n1, 1) *= -1.0;
        soc_[is].w = eta * w;
        soc_[is].winv = winv / eta;
        ls = soc_[is].w * zs;
        ++is;
        break;
      }
      case ConeKind::kPsd: {
        Eigen::LLT<MatrixXd> cs(smat(ss, b.dim));
        Eigen::LLT<MatrixXd> cz(smat(zs, b.dim));
        if (cs.info() != Eigen::Success || cz.info() != Eigen::Success) return false;
        const MatrixXd ls_m = cs.matrixL();
        const MatrixXd lz_m = cz.matrixL();
        Eigen::JacobiSVD<MatrixXd> svd(lz_m.transpose() * ls_m,
                                       Eigen::ComputeFullU | Eigen::ComputeFullV);
        const VectorXd sig = svd.singularValues();
        if (sig.minCoeff() <= 0.0) return false;
        const VectorXd isq = sig.cwiseSqrt().cwiseInverse();
        auto& p = psd_[ip++];
        p.r = ls_m * svd.matrixV() * isq.asDiagonal();
        p.rti = lz_m * svd.matrixU() * isq.asDiagonal();
        p.f = p.r * p.r.transpose();
        p.g = p.rti * p.rti.transpose();
        ls.setZero();
        for (int c = 0; c < b.dim; ++c) ls(svec_index(b.dim, c, c)) = sig(c);
        break;
      }
    }
  }
  return true;
}

namespace {

enum class Op { kW, kWt, kWinv, kWinvt, kH, kHinv };

VectorXd apply(const NtScaling& nt, const VectorXd& v, Op op) {
  VectorXd out = VectorXd::Zero(v.size());
  int in = 0, is = 0, ip = 0;
  for (const auto& b : nt.blocks()) {
    const auto vs = v.segment(b.offset, b.size);
    auto os = out.segment(b.offset, b.size);
    switch (b.kind) {
      case ConeKind::kZero:
        break;
      case ConeKind::kNonNeg: {
        const VectorXd& d = nt.nonneg_d(in++);
        switch (op) {
          case Op::kW:
          case Op::kWt:
            os = d.cwiseProduct(vs);
            break;
          case Op::kWinv:
          case Op::kWinvt:
            os = vs.cwiseQuotient(d);
            break;
          case Op::kH:
            os = d.cwiseProduct(d).cwiseProduct(vs);
            break;
          case Op::kHinv:
            os = vs.cwiseQuotient(d.cwiseProduct(d));
            break;
        }
        break;
      }
      case ConeKind::kSoc: {
        const auto& sc = nt.soc(is++);
        switch (op) {
          case Op::kW:
          case Op::kWt:
            os = sc.w * vs;
            break;
          case Op::kWinv:
          case Op::kWinvt:
            os = sc.winv * vs;
            break;
          case Op::kH:
            os = sc.w * (sc.w * vs);
            break;
          case Op::kHinv:
            os = sc.winv * (sc.winv * vs);
            break;
        }
        break;
      }
      case ConeKind::kPsd: {
        const auto& p = nt.psd(ip++);
        const VectorXd vv = vs;
        switch (op) {
          case Op::kW:
            os = congruence(p.r, vv, true);
            break;
          case Op::kWt:
            os = congruence(p.r, vv, false);
            break;
          case Op::kWinv:
            os = congruence(p.rti, vv, false);
            break;
          case Op::kWinvt:
            os = congruence(p.rti, vv, true);
            break;
          case Op::kH:
            os = svec(p.f * smat(vv, b.dim) * p.f);
            break;
          case Op::kHinv:
            os = svec(p.g * smat(vv, b.dim) * p.g);
            break;
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace

VectorXd NtScaling::w(const VectorXd& v) const { return apply(*this, v, Op::kW); }
VectorXd NtScaling::wt(const VectorXd& v) const { return apply(*this, v, Op::kWt); }
VectorXd NtScaling::winv(const VectorXd& v) const { return apply(*this, v, Op::kWinv); }
VectorXd NtScaling::winvt(const VectorXd& v) const { return apply(*this, v, Op::kWinvt); }
VectorXd NtScaling::h(const VectorXd& v) const { return apply(*this, v, Op::kH); }
VectorXd NtScaling::hinv(const VectorXd& v) const { return apply(*this, v, Op::kHinv); }

}  // namespace phaserelax::detail
