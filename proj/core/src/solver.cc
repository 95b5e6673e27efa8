#include "phaserelax/solver.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "cones.h"

namespace phaserelax {

using detail::BlockRange;
using detail::NtScaling;

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kMaxIters:
      return "max_iters";
  }
  return "?";
}

nlohmann::json to_json(const Solution& sol) {
  auto vec = [](const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return nlohmann::json{{"status", status_name(sol.status)},
                        {"objective", sol.objective},
                        {"dual_objective", sol.dual_objective},
                        {"residual_primal", sol.residual_primal},
                        {"residual_dual", sol.residual_dual},
                        {"residual_gap", sol.residual_gap},
                        {"iterations", sol.iterations},
                        {"wallclock", sol.wallclock},
                        {"note", sol.note},
                        {"x", vec(sol.x)},
                        {"y", vec(sol.y)},
                        {"s", vec(sol.s)}};
}

VectorXd project_cone(const VectorXd& v, const ConeBlock& block) {
  if (v.size() != block.size()) throw Error("projection dimension mismatch");
  switch (block.kind) {
    case ConeKind::kZero:
      return VectorXd::Zero(v.size());
    case ConeKind::kNonNeg:
      return v.cwiseMax(0.0);
    case ConeKind::kSoc: {
      const double t = v(0);
      const double nx = v.tail(v.size() - 1).norm();
      if (nx <= t) return v;
      if (nx <= -t) return VectorXd::Zero(v.size());
      VectorXd out(v.size());
      const double a = 0.5 * (t + nx);
      out(0) = a;
      out.tail(v.size() - 1) = (a / nx) * v.tail(v.size() - 1);
      return out;
    }
    case ConeKind::kPsd: {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(smat(v, block.dim));
      const VectorXd ev = es.eigenvalues().cwiseMax(0.0);
      const MatrixXd& q = es.eigenvectors();
      return svec(q * ev.asDiagonal() * q.transpose());
    }
  }
  return v;
}

VectorXd project_dual_cone(const VectorXd& v, const ConeBlock& block) {
  if (block.kind == ConeKind::kZero) return v;
  return project_cone(v, block);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Equilibration: A <- D A E with D constant on each SOC / PSD block.

struct Scaling {
  VectorXd d;  // rows
  VectorXd e;  // columns
};

Scaling equilibrate(const MatrixXd& a, const std::vector<BlockRange>& blocks, bool enabled) {
  Scaling sc{VectorXd::Ones(a.rows()), VectorXd::Ones(a.cols())};
  if (!enabled || a.size() == 0) return sc;
  MatrixXd w = a.cwiseAbs();
  for (int it = 0; it < 15; ++it) {
    VectorXd rn = w.rowwise().maxCoeff();
    for (const auto& b : blocks) {
      if (b.kind == ConeKind::kSoc || b.kind == ConeKind::kPsd) {
        rn.segment(b.offset, b.size).setConstant(rn.segment(b.offset, b.size).maxCoeff());
      }
    }
    VectorXd cn = w.colwise().maxCoeff().transpose();
    VectorXd dr = rn.unaryExpr([](double v) { return v > 1e-12 ? 1.0 / std::sqrt(v) : 1.0; });
    VectorXd dc = cn.unaryExpr([](double v) { return v > 1e-12 ? 1.0 / std::sqrt(v) : 1.0; });
    w = dr.asDiagonal() * w * dc.asDiagonal();
    sc.d = sc.d.cwiseProduct(dr);
    sc.e = sc.e.cwiseProduct(dc);
    if ((rn.array() - 1.0).abs().maxCoeff() < 0.1 && (cn.array() - 1.0).abs().maxCoeff() < 0.1) break;
  }
  return sc;
}

// ---------------------------------------------------------------------------
// Reduced KKT system [[0, A'], [A, -H]] solved by normal equations on the
// cone rows and a Schur complement on the zero-cone rows.

class KktSolver {
 public:
  KktSolver(const MatrixXd& a, const std::vector<BlockRange>& blocks) : a_(a), blocks_(blocks) {
    const int n = static_cast<int>(a.cols());
    for (const auto& b : blocks) {
      if (b.kind == ConeKind::kZero) {
        for (int r = 0; r < b.size; ++r) eq_rows_.push_back(b.offset + r);
        continue;
      }
      if (b.kind == ConeKind::kNonNeg) {
        for (int r = 0; r < b.size; ++r) {
          std::vector<std::pair<int, double>> row;
          for (int k = 0; k < n; ++k) {
            if (a(b.offset + r, k) != 0.0) row.push_back({k, a(b.offset + r, k)});
          }
          lp_rows_.push_back({b.offset + r, std::move(row)});
        }
        continue;
      }
      Dense blk;
      blk.block = static_cast<int>(&b - blocks.data());
      for (int k = 0; k < n; ++k) {
        if (a.col(k).segment(b.offset, b.size).cwiseAbs().maxCoeff() > 0.0) blk.cols.push_back(k);
      }
      blk.sub = MatrixXd(b.size, blk.cols.size());
      for (size_t p = 0; p < blk.cols.size(); ++p) {
        blk.sub.col(p) = a.col(blk.cols[p]).segment(b.offset, b.size);
      }
      if (b.kind == ConeKind::kPsd) {
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        blk.entries.resize(blk.cols.size());
        for (size_t p = 0; p < blk.cols.size(); ++p) {
          int t = 0;
          for (int c = 0; c < b.dim; ++c) {
            for (int r = c; r < b.dim; ++r, ++t) {
              const double v = blk.sub(t, p);
              if (v == 0.0) continue;
              if (r == c) {
                blk.entries[p].push_back({r, c, v});
              } else {
                blk.entries[p].push_back({r, c, v * inv_sqrt2});
                blk.entries[p].push_back({c, r, v * inv_sqrt2});
              }
            }
          }
        }
      }
      dense_.push_back(std::move(blk));
    }
    ae_ = MatrixXd(eq_rows_.size(), n);
    for (size_t r = 0; r < eq_rows_.size(); ++r) ae_.row(r) = a.row(eq_rows_[r]);
  }

  bool factor(const NtScaling& nt) {
    nt_ = &nt;
    const int n = static_cast<int>(a_.cols());
    MatrixXd m = MatrixXd::Zero(n, n);
    int in = 0;
    std::vector<int> nonneg_blocks;
    for (const auto& b : blocks_) {
      if (b.kind == ConeKind::kNonNeg) nonneg_blocks.push_back(static_cast<int>(&b - blocks_.data()));
    }
    // NonNeg rows: rank-one updates restricted to the row's nonzeros.
    {
      size_t row_ptr = 0;
      for (int bi : nonneg_blocks) {
        const auto& b = blocks_[bi];
        const VectorXd& d = nt.nonneg_d(in++);
        for (int r = 0; r < b.size; ++r, ++row_ptr) {
          const auto& row = lp_rows_[row_ptr].second;
          const double w = 1.0 / (d(r) * d(r));
          for (const auto& [k, vk] : row) {
            for (const auto& [l, vl] : row) {
              if (l <= k) m(k, l) += w * vk * vl;
            }
          }
        }
      }
    }
    int is = 0, ip = 0;
    for (const auto& blk : dense_) {
      const auto& b = blocks_[blk.block];
      const int nc = static_cast<int>(blk.cols.size());
      if (b.kind == ConeKind::kSoc) {
        const auto& sc = nt.soc(is++);
        const MatrixXd t = sc.winv * blk.sub;
        const MatrixXd g = t.transpose() * t;
        for (int p = 0; p < nc; ++p) {
          for (int q = 0; q <= p; ++q) m(blk.cols[p], blk.cols[q]) += g(p, q);
        }
      } else {
        const MatrixXd& g = nt.psd(ip++).g;
        for (int p = 0; p < nc; ++p) {
          const auto& ep = blk.entries[p];
          for (int q = 0; q <= p; ++q) {
            double acc = 0.0;
            for (const auto& x : ep) {
              for (const auto& y : blk.entries[q]) acc += x.v * y.v * g(x.c, y.r) * g(y.c, x.r);
            }
            m(blk.cols[p], blk.cols[q]) += acc;
          }
        }
      }
    }
    // Jacobi scaling keeps the regularization relative to every diagonal.
    js_ = m.diagonal().unaryExpr([](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 1.0; });
    MatrixXd ms = m.selfadjointView<Eigen::Lower>();
    ms = js_.asDiagonal() * ms * js_.asDiagonal();
    double delta = 1e-13;
    for (int attempt = 0; attempt < 8; ++attempt, delta *= 100.0) {
      MatrixXd mr = ms;
      mr.diagonal().array() += delta;
      llt_.compute(mr);
      if (llt_.info() == Eigen::Success) break;
      if (attempt == 7) return false;
    }
    if (!eq_rows_.empty()) {
      const MatrixXd y = llt_.matrixL().solve(js_.asDiagonal() * ae_.transpose());
      const MatrixXd s = y.transpose() * y;
      es_ = s.diagonal().unaryExpr([](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 1.0; });
      const MatrixXd ss = es_.asDiagonal() * s * es_.asDiagonal();
      double de = 1e-13;
      for (int attempt = 0; attempt < 8; ++attempt, de *= 100.0) {
        MatrixXd sr = ss;
        sr.diagonal().array() += de;
        schur_.compute(sr);
        if (schur_.info() == Eigen::Success) break;
        if (attempt == 7) return false;
      }
    }
    return true;
  }

  // Solves [[0, A'], [A, -H]] [x; z] = [r1; r2].
  void solve(const VectorXd& r1, const VectorXd& r2, VectorXd& x, VectorXd& z) const {
    solve_once(r1, r2, x, z);
    const double base = std::max(1.0, std::max(r1.lpNorm<Eigen::Infinity>(), r2.lpNorm<Eigen::Infinity>()));
    for (int it = 0; it < 4; ++it) {
      const VectorXd e1 = r1 - a_.transpose() * z;
      VectorXd e2 = r2 - a_ * x + nt_->h(z);
      const double err = std::max(e1.lpNorm<Eigen::Infinity>(), e2.lpNorm<Eigen::Infinity>());
      if (err <= 1e-14 * base) break;
      VectorXd dx, dz;
      solve_once(e1, e2, dx, dz);
      x += dx;
      z += dz;
    }
  }

 private:
  struct Entry {
    int r, c;
    double v;
  };
  struct Dense {
    int block = 0;
    std::vector<int> cols;
    MatrixXd sub;
    std::vector<std::vector<Entry>> entries;
  };

  VectorXd msolve(const VectorXd& t) const { return js_.cwiseProduct(llt_.solve(js_.cwiseProduct(t))); }

  void solve_once(const VectorXd& r1, const VectorXd& r2, VectorXd& x, VectorXd& z) const {
    VectorXd rc = r2;
    for (int r : eq_rows_) rc(r) = 0.0;
    const VectorXd hr = nt_->hinv(rc);
    const VectorXd t = r1 + a_.transpose() * hr;
    VectorXd u = msolve(t);
    VectorXd ze;
    if (!eq_rows_.empty()) {
      VectorXd re(eq_rows_.size());
      for (size_t k = 0; k < eq_rows_.size(); ++k) re(k) = r2(eq_rows_[k]);
      ze = es_.cwiseProduct(schur_.solve(es_.cwiseProduct(ae_ * u - re)));
      u -= msolve(ae_.transpose() * ze);
    }
    x = u;
    VectorXd ax = a_ * x;
    for (int r : eq_rows_) ax(r) = 0.0;
    z = nt_->hinv(ax - rc);
    for (size_t k = 0; k < eq_rows_.size(); ++k) z(eq_rows_[k]) = ze(k);
  }

  const MatrixXd& a_;
  std::vector<BlockRange> blocks_;
  std::vector<int> eq_rows_;
  MatrixXd ae_;
  std::vector<std::pair<int, std::vector<std::pair<int, double>>>> lp_rows_;
  std::vector<Dense> dense_;
  const NtScaling* nt_ = nullptr;
  VectorXd js_, es_;
  Eigen::LLT<MatrixXd> llt_;
  Eigen::LLT<MatrixXd> schur_;
};

struct Metrics {
  double pres = kInf, dres = kInf, gap = kInf;
  double pobj = 0.0, dobj = 0.0;
};

}  // namespace

Solution solve(const ConicProgram& prog, const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  prog.check_dimensions();
  if (!(opts.eps_primal > 0.0 && opts.eps_dual > 0.0 && opts.eps_gap > 0.0)) {
    throw Error("solver tolerances must be positive");
  }
  if (opts.max_iters < 1) throw Error("max_iters must be positive");

  const int n = prog.num_vars();
  const int m = prog.num_rows();
  const auto blocks = detail::make_layout(prog.cones);
  const Scaling sc = equilibrate(prog.a, blocks, opts.scaling);
  const MatrixXd a = sc.d.asDiagonal() * prog.a * sc.e.asDiagonal();
  const VectorXd b = sc.d.cwiseProduct(prog.b);
  const VectorXd c = sc.e.cwiseProduct(prog.c);

  std::vector<char> is_eq(m, 0);
  for (const auto& blk : blocks) {
    if (blk.kind == ConeKind::kZero) std::fill(is_eq.begin() + blk.offset, is_eq.begin() + blk.offset + blk.size, 1);
  }
  auto zero_eq = [&](VectorXd& v) {
    for (int r = 0; r < m; ++r) {
      if (is_eq[r]) v(r) = 0.0;
    }
  };

  const int degree = detail::cone_degree(blocks);
  const double bnorm = std::max(1.0, prog.b.norm());
  const double cnorm = std::max(1.0, prog.c.norm());

  auto unscale = [&](const VectorXd& x, const VectorXd& s, const VectorXd& z, double tau,
                     VectorXd& xo, VectorXd& so, VectorXd& zo) {
    xo = sc.e.cwiseProduct(x) / tau;
    so = s.cwiseQuotient(sc.d) / tau;
    zo = sc.d.cwiseProduct(z) / tau;
  };
  auto metrics = [&](const VectorXd& x, const VectorXd& s, const VectorXd& z) {
    Metrics mt;
    mt.pres = (prog.a * x + s - prog.b).norm() / bnorm;
    mt.dres = (prog.a.transpose() * z + prog.c).norm() / cnorm;
    mt.pobj = prog.c.dot(x);
    mt.dobj = -prog.b.dot(z);
    mt.gap = std::abs(mt.pobj - mt.dobj) / (1.0 + std::abs(mt.pobj));
    return mt;
  };

  Solution sol;
  NtScaling nt(blocks);
  KktSolver kkt(a, blocks);

  // Starting point from two least-squares problems with H = I.
  VectorXd x(n), z(m), s(m);
  nt.set_identity();
  if (!kkt.factor(nt)) throw Error("KKT factorization failed at the starting point");
  {
    VectorXd xs, zs;
    kkt.solve(VectorXd::Zero(n), b, xs, zs);
    x = xs;
    s = -zs;
    zero_eq(s);
    VectorXd xd, zd;
    kkt.solve(-c, VectorXd::Zero(m), xd, zd);
    z = zd;
    const double ps = -detail::min_eigenvalue(blocks, s);
    if (std::isfinite(ps) && ps >= -1e-8 * std::max(1.0, s.norm())) detail::add_identity(blocks, s, 1.0 + ps);
    const double pz = -detail::min_eigenvalue(blocks, z);
    if (std::isfinite(pz) && pz >= -1e-8 * std::max(1.0, z.norm())) detail::add_identity(blocks, z, 1.0 + pz);
  }
  double tau = 1.0, kappa = 1.0;

  VectorXd best_x = x, best_s = s, best_z = z;
  double best_tau = tau;
  double best_score = kInf;
  Metrics best_mt;
  int stall = 0;
  double last_mu = kInf;

  for (int iter = 0; iter <= opts.max_iters; ++iter) {
    sol.iterations = iter;
    VectorXd xo, so, zo;
    unscale(x, s, z, tau, xo, so, zo);
    const Metrics mt = metrics(xo, so, zo);
    const double score = std::max({mt.pres / opts.eps_primal, mt.dres / opts.eps_dual, mt.gap / opts.eps_gap});
    if (score < best_score) {
      best_score = score;
      best_x = x;
      best_s = s;
      best_z = z;
      best_tau = tau;
      best_mt = mt;
    }
    const double mu = (s.dot(z) + tau * kappa) / (degree + 1);
    if (opts.verbose) {
      std::fprintf(stderr, "%3d  pobj % .8e  dobj % .8e  pres %.2e  dres %.2e  gap %.2e  tau %.2e  kappa %.2e  mu %.2e\n",
                   iter, mt.pobj, mt.dobj, mt.pres, mt.dres, mt.gap, tau, kappa, mu);
    }
    if (mt.pres <= opts.eps_primal && mt.dres <= opts.eps_dual && mt.gap <= opts.eps_gap) {
      sol.status = SolveStatus::kOptimal;
      break;
    }
    // Certificates, measured in original units on the unnormalized iterate.
    {
      VectorXd xc = sc.e.cwiseProduct(x), sc_s = s.cwiseQuotient(sc.d), zc = sc.d.cwiseProduct(z);
      const double bz = prog.b.dot(zc);
      const double cx = prog.c.dot(xc);
      if (bz < 0.0) {
        const double pinf = (prog.a.transpose() * zc).norm() / cnorm / (-bz);
        if (pinf <= opts.eps_dual) {
          sol.status = SolveStatus::kInfeasible;
          sol.note = "primal infeasibility certificate";
          best_x = x, best_s = s, best_z = z, best_tau = tau;
          break;
        }
      }
      if (cx < 0.0) {
        const double dinf = (prog.a * xc + sc_s).norm() / bnorm / (-cx);
        if (dinf <= opts.eps_primal) {
          sol.status = SolveStatus::kUnbounded;
          sol.note = "dual infeasibility certificate";
          best_x = x, best_s = s, best_z = z, best_tau = tau;
          break;
        }
      }
    }
    if (iter == opts.max_iters) {
      sol.note = "iteration limit";
      break;
    }

    if (!nt.compute(s, z)) {
      sol.note = "iterate left the cone interior";
      break;
    }
    if (!kkt.factor(nt)) {
      sol.note = "KKT factorization failed";
      break;
    }
    const VectorXd& lam = nt.lambda();
    const VectorXd f1 = a.transpose() * z + c * tau;
    VectorXd f2 = a * x + s - b * tau;
    const double f3 = c.dot(x) + b.dot(z) + kappa;

    VectorXd x1, z1;
    kkt.solve(-c, b, x1, z1);
    const double den = c.dot(x1) + b.dot(z1) - kappa / tau;

    struct Dir {
      VectorXd dx, dz, ds;
      double dtau = 0.0, dkappa = 0.0;
    };
    auto direction = [&](double sigma, const VectorXd& q, double dk_rhs) {
      Dir d;
      VectorXd x2, z2;
      const VectorXd wtq = nt.wt(q);
      kkt.solve(-(1.0 - sigma) * f1, -(1.0 - sigma) * f2 - wtq, x2, z2);
      d.dtau = (-(1.0 - sigma) * f3 - c.dot(x2) - b.dot(z2) - dk_rhs / tau) / den;
      d.dx = x2 + d.dtau * x1;
      d.dz = z2 + d.dtau * z1;
      d.ds = wtq - nt.h(d.dz);
      zero_eq(d.ds);
      d.dkappa = (dk_rhs - kappa * d.dtau) / tau;
      return d;
    };
    auto step_to_boundary = [&](const Dir& d) {
      const VectorXd dss = nt.winvt(d.ds);
      const VectorXd dzs = nt.w(d.dz);
      double amax = std::min(detail::max_step(blocks, lam, dss), detail::max_step(blocks, lam, dzs));
      if (d.dtau < 0.0) amax = std::min(amax, -tau / d.dtau);
      if (d.dkappa < 0.0) amax = std::min(amax, -kappa / d.dkappa);
      return amax;
    };

    // Predictor.
    const Dir aff = direction(0.0, -lam, -tau * kappa);
    const double a_aff = std::min(1.0, step_to_boundary(aff));
    const double sigma = std::clamp(std::pow(1.0 - a_aff, 3.0), 0.0, 1.0);

    // Corrector.
    VectorXd e = VectorXd::Zero(m);
    detail::add_identity(blocks, e, 1.0);
    const VectorXd corr = detail::jordan_product(blocks, nt.winvt(aff.ds), nt.w(aff.dz));
    const VectorXd rhs = sigma * mu * e - detail::jordan_product(blocks, lam, lam) - corr;
    const VectorXd q = detail::jordan_divide(blocks, lam, rhs);
    const double dk_rhs = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
    const Dir d = direction(sigma, q, dk_rhs);
    const double amax = step_to_boundary(d);
    const double alpha = std::min(1.0, 0.99 * amax);
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      sol.note = "no progress along the search direction";
      break;
    }
    x += alpha * d.dx;
    z += alpha * d.dz;
    s += alpha * d.ds;
    tau += alpha * d.dtau;
    kappa += alpha * d.dkappa;
    zero_eq(s);

    if (alpha < 1e-8 || mu > 0.9999 * last_mu) {
      if (++stall >= 8) {
        sol.note = "stalled";
        break;
      }
    } else {
      stall = 0;
    }
    last_mu = std::min(last_mu, mu);
  }

  if (sol.status == SolveStatus::kOptimal) {
    best_x = x, best_s = s, best_z = z, best_tau = tau;
    best_mt = metrics(sc.e.cwiseProduct(x) / tau, s.cwiseQuotient(sc.d) / tau, sc.d.cwiseProduct(z) / tau);
  }
  if (sol.status == SolveStatus::kInfeasible || sol.status == SolveStatus::kUnbounded) {
    // Certificates are reported unnormalized.
    sol.x = sc.e.cwiseProduct(best_x);
    sol.s = best_s.cwiseQuotient(sc.d);
    sol.y = sc.d.cwiseProduct(best_z);
    sol.objective = sol.status == SolveStatus::kInfeasible ? kInf * prog.objective_scale
                                                           : -kInf * prog.objective_scale;
    sol.dual_objective = sol.objective;
  } else {
    unscale(best_x, best_s, best_z, best_tau, sol.x, sol.s, sol.y);
    sol.objective = prog.objective_scale * best_mt.pobj + prog.objective_offset;
    sol.dual_objective = prog.objective_scale * best_mt.dobj + prog.objective_offset;
    sol.residual_primal = best_mt.pres;
    sol.residual_dual = best_mt.dres;
    sol.residual_gap = best_mt.gap;
  }
  sol.wallclock = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

}  // namespace phaserelax
