#include "mdiq/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>

namespace mdiq::conic {

namespace {

int svec_dim(int p) { return p * (p + 1) / 2; }

void svec_into(const RealMatrix& m, double* out) {
  const int p = static_cast<int>(m.rows());
  const double s = std::sqrt(2.0);
  int k = 0;
  for (int j = 0; j < p; ++j) {
    out[k++] = m(j, j);
    for (int i = j + 1; i < p; ++i) out[k++] = s * m(i, j);
  }
}

RealMatrix smat(const double* v, int p) {
  const double s = 1.0 / std::sqrt(2.0);
  RealMatrix m(p, p);
  int k = 0;
  for (int j = 0; j < p; ++j) {
    m(j, j) = v[k++];
    for (int i = j + 1; i < p; ++i) {
      m(i, j) = s * v[k];
      m(j, i) = s * v[k];
      ++k;
    }
  }
  return m;
}

// Symmetric positive-(semi)definite matrix power via eigendecomposition,
// with an eigenvalue floor to survive points near the cone boundary.
RealMatrix sym_pow(const RealMatrix& m, double expo) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(m);
  const double top = std::max(es.eigenvalues().maxCoeff(), 1e-300);
  RealVector v = es.eigenvalues();
  for (int i = 0; i < v.size(); ++i)
    v(i) = std::pow(std::max(v(i), 1e-16 * top), expo);
  return es.eigenvectors() * v.asDiagonal() * es.eigenvectors().transpose();
}

struct Layout {
  int n_orth = 0;
  std::vector<int> psd_off;  // offset of each psd block in cone space
  int total = 0;
  int degree = 0;
};

Layout make_layout(const IpmProblem& p) {
  Layout lo;
  lo.n_orth = static_cast<int>(p.orth.size());
  lo.total = lo.n_orth;
  lo.degree = lo.n_orth;
  for (const auto& blk : p.psd) {
    lo.psd_off.push_back(lo.total);
    lo.total += svec_dim(blk.p);
    lo.degree += blk.p;
  }
  return lo;
}

// Nesterov-Todd scaling state, one entry per cone component.
struct Scaling {
  RealVector w2_orth;   // per-coordinate W^2 = s/z
  RealVector lam_orth;  // sqrt(s z)
  std::vector<RealMatrix> R;     // block W^2, solves R Z R = S
  std::vector<RealMatrix> Rinv;
  std::vector<RealMatrix> Wm;    // R^{1/2}
  std::vector<RealMatrix> Wminv;
  std::vector<RealMatrix> lam;   // scaled point, Wm Z Wm
  std::vector<Eigen::SelfAdjointEigenSolver<RealMatrix>> lam_eig;
  bool identity = false;  // used by the least-squares initialization
};

class Solver {
 public:
  Solver(const IpmProblem& p, const SolverOptions& opts)
      : p_(p), opts_(opts), lo_(make_layout(p)), m_(static_cast<int>(p.eq_rows.size())) {
    build_groups();
    norm_b_ = m_ ? p_.b.cwiseAbs().maxCoeff() : 0.0;
    norm_c_ = p_.n ? p_.c.cwiseAbs().maxCoeff() : 0.0;
    h_ = RealVector::Zero(lo_.total);
    for (int r = 0; r < lo_.n_orth; ++r) h_(r) = p_.orth[r].h;
    for (std::size_t k = 0; k < p_.psd.size(); ++k)
      svec_into(p_.psd[k].h, h_.data() + lo_.psd_off[k]);
    norm_h_ = lo_.total ? h_.cwiseAbs().maxCoeff() : 0.0;
  }

  IpmResult solve();

 private:
  // -- cone-space linear maps -------------------------------------------------
  RealVector cone_e() const {
    RealVector e = RealVector::Zero(lo_.total);
    for (int r = 0; r < lo_.n_orth; ++r) e(r) = 1.0;
    for (std::size_t k = 0; k < p_.psd.size(); ++k) {
      RealMatrix id = RealMatrix::Identity(p_.psd[k].p, p_.psd[k].p);
      svec_into(id, e.data() + lo_.psd_off[k]);
    }
    return e;
  }

  RealVector apply_G(const RealVector& u) const {
    RealVector out = RealVector::Zero(lo_.total);
    for (int r = 0; r < lo_.n_orth; ++r) {
      double acc = 0.0;
      for (const auto& [c, v] : p_.orth[r].a.entries) acc += v * u(c);
      out(r) = acc;
    }
    for (std::size_t k = 0; k < p_.psd.size(); ++k) {
      const auto& blk = p_.psd[k];
      RealMatrix acc = RealMatrix::Zero(blk.p, blk.p);
      for (std::size_t j = 0; j < blk.cols.size(); ++j)
        acc += u(blk.cols[j]) * blk.coeff[j];
      svec_into(acc, out.data() + lo_.psd_off[k]);
    }
    return out;
  }

  RealVector apply_Gt(const RealVector& z) const {
    RealVector out = RealVector::Zero(p_.n);
    for (int r = 0; r < lo_.n_orth; ++r)
      for (const auto& [c, v] : p_.orth[r].a.entries) out(c) += v * z(r);
    for (std::size_t k = 0; k < p_.psd.size(); ++k) {
      const auto& blk = p_.psd[k];
      const RealMatrix zm = smat(z.data() + lo_.psd_off[k], blk.p);
      for (std::size_t j = 0; j < blk.cols.size(); ++j)
        out(blk.cols[j]) += (blk.coeff[j].array() * zm.array()).sum();
    }
    return out;
  }

  RealVector apply_A(const RealVector& u) const {
    RealVector out(m_);
    for (int i = 0; i < m_; ++i) {
      double acc = 0.0;
      for (const auto& [c, v] : p_.eq_rows[i].entries) acc += v * u(c);
      out(i) = acc;
    }
    return out;
  }

  RealVector apply_At(const RealVector& y) const {
    RealVector out = RealVector::Zero(p_.n);
    for (int i = 0; i < m_; ++i)
      for (const auto& [c, v] : p_.eq_rows[i].entries) out(c) += v * y(i);
    return out;
  }

  // -- scaling ------------------------------------------------------------------
  Scaling make_identity_scaling() const {
    Scaling w;
    w.identity = true;
    w.w2_orth = RealVector::Ones(lo_.n_orth);
    for (const auto& blk : p_.psd) {
      w.R.push_back(RealMatrix::Identity(blk.p, blk.p));
      w.Rinv.push_back(RealMatrix::Identity(blk.p, blk.p));
    }
    return w;
  }

  Scaling compute_scaling(const RealVector& s, const RealVector& z) const {
    Scaling w;
    w.w2_orth.resize(lo_.n_orth);
    w.lam_orth.resize(lo_.n_orth);
    for (int r = 0; r < lo_.n_orth; ++r) {
      w.w2_orth(r) = s(r) / z(r);
      w.lam_orth(r) = std::sqrt(s(r) * z(r));
    }
    for (std::size_t k = 0; k < p_.psd.size(); ++k) {
      const int p = p_.psd[k].p;
      const RealMatrix S = smat(s.data() + lo_.psd_off[k], p);
      const RealMatrix Z = smat(z.data() + lo_.psd_off[k], p);
      const RealMatrix Sh = sym_pow(S, 0.5);
      const RealMatrix T = Sh * Z * Sh;
      const RealMatrix R = Sh * sym_pow(T, -0.5) * Sh;
      w.R.push_back(R);
      w.Rinv.push_back(sym_pow(R, -1.0));
      w.Wm.push_back(sym_pow(R, 0.5));
      w.Wminv.push_back(sym_pow(R, -0.5));
      w.lam.push_back(w.Wm.back() * Z * w.Wm.back());
      w.lam.back() = 0.5 * (w.lam.back() + w.lam.back().transpose()).eval();
      w.lam_eig.emplace_back(w.lam.back());
    }
    return w;
  }

  // H(v) = W o W applied to cone vector; H^{-1} uses Rinv.
  RealVector apply_Hinv(const Scaling& w, const RealVector& v) const {
    RealVector out(lo_.total);
    for (int r = 0; r < lo_.n_orth; ++r) out(r) = v(r) / w.w2_orth(r);
    for (std::size_t k = 0; k < p_.psd.size(); ++k) {
      const int p = p_.psd[k].p;
      const RealMatrix vm = smat(v.data() + lo_.psd_off[k], p);
      const RealMatrix r = w.Rinv[k] * vm * w.Rinv[k];
      RealMatrix rs = 0.5 * (r + r.transpose());
      svec_into(rs, out.data() + lo_.psd_off[k]);
    }
    return out;
  }

  RealVector apply_H(const Scaling& w, const RealVector& v) const {
    RealVector out(lo_.total);
    for (int r = 0; r < lo_.n_orth; ++r) out(r) = v(r) * w.w2_orth(r);
    for (std::size_t k = 0; k < p_.psd.size(); ++k) {
      const int p = p_.psd[k].p;
      const RealMatrix vm = smat(v.data() + lo_.psd_off[k], p);
      const RealMatrix r = w.R[k] * vm * w.R[k];
      RealMatrix rs = 0.5 * (r + r.transpose());
      svec_into(rs, out.data() + lo_.psd_off[k]);
    }
    return out;
  }

  // W(v): orth multiplies by sqrt(w2); psd conjugates by Wm.
  RealVector apply_W(const Scaling& w, const RealVector& v) const {
    RealVector out(lo_.total);
    for (int r = 0; r < lo_.n_orth; ++r) out(r) = v(r) * std::sqrt(w.w2_orth(r));
    for (std::size_t k = 0; k < p_.psd.size(); ++k) {
      const int p = p_.psd[k].p;
      const RealMatrix vm = smat(v.data() + lo_.psd_off[k], p);
      const RealMatrix r = w.Wm[k] * vm * w.Wm[k];
      RealMatrix rs = 0.5 * (r + r.transpose());
      svec_into(rs, out.data() + lo_.psd_off[k]);
    }
    return out;
  }

  RealVector apply_Winv(const Scaling& w, const RealVector& v) const {
    RealVector out(lo_.total);
    for (int r = 0; r < lo_.n_orth; ++r) out(r) = v(r) / std::sqrt(w.w2_orth(r));
    for (std::size_t k = 0; k < p_.psd.size(); ++k) {
      const int p = p_.psd[k].p;
      const RealMatrix vm = smat(v.data() + lo_.psd_off[k], p);
      const RealMatrix r = w.Wminv[k] * vm * w.Wminv[k];
      RealMatrix rs = 0.5 * (r + r.transpose());
      svec_into(rs, out.data() + lo_.psd_off[k]);
    }
    return out;
  }

  // Solve lambda o x = d per cone component.
  RealVector lyapunov_solve(const Scaling& w, const RealVector& d) const {
    RealVector out(lo_.total);
    for (int r = 0; r < lo_.n_orth; ++r) out(r) = d(r) / w.lam_orth(r);
    for (std::size_t k = 0; k < p_.psd.size(); ++k) {
      const int p = p_.psd[k].p;
      const auto& es = w.lam_eig[k];
      const RealMatrix dm = smat(d.data() + lo_.psd_off[k], p);
      RealMatrix dt = es.eigenvectors().transpose() * dm * es.eigenvectors();
      const double top = std::max(es.eigenvalues().maxCoeff(), 1e-300);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
          const double den = std::max(es.eigenvalues()(i) + es.eigenvalues()(j),
                                      2e-16 * top);
          dt(i, j) = 2.0 * dt(i, j) / den;
        }
      RealMatrix x = es.eigenvectors() * dt * es.eigenvectors().transpose();
      RealMatrix xs = 0.5 * (x + x.transpose());
      svec_into(xs, out.data() + lo_.psd_off[k]);
    }
    return out;
  }

  // Symmetrized Jordan product of two cone vectors (for the corrector).
  RealVector jordan_product(const RealVector& a, const RealVector& b) const {
    RealVector out(lo_.total);
    for (int r = 0; r < lo_.n_orth; ++r) out(r) = a(r) * b(r);
    for (std::size_t k = 0; k < p_.psd.size(); ++k) {
      const int p = p_.psd[k].p;
      const RealMatrix am = smat(a.data() + lo_.psd_off[k], p);
      const RealMatrix bm = smat(b.data() + lo_.psd_off[k], p);
      RealMatrix prod = 0.5 * (am * bm + bm * am);
      svec_into(prod, out.data() + lo_.psd_off[k]);
    }
    return out;
  }

  // Largest step alpha with lambda + alpha * mat(d_scaled) staying in the cone
  // (and tau, kappa staying nonnegative); d is in the scaled space.
  double max_step(const Scaling& w, const RealVector& d_scaled) const {
    double bound = std::numeric_limits<double>::infinity();
    for (int r = 0; r < lo_.n_orth; ++r)
      if (d_scaled(r) < 0.0)
        bound = std::min(bound, -w.lam_orth(r) / d_scaled(r));
    for (std::size_t k = 0; k < p_.psd.size(); ++k) {
      const int p = p_.psd[k].p;
      const auto& es = w.lam_eig[k];
      const double top = std::max(es.eigenvalues().maxCoeff(), 1e-300);
      RealVector inv_sqrt = es.eigenvalues();
      for (int i = 0; i < p; ++i)
        inv_sqrt(i) = 1.0 / std::sqrt(std::max(inv_sqrt(i), 1e-16 * top));
      const RealMatrix dm = smat(d_scaled.data() + lo_.psd_off[k], p);
      RealMatrix b = inv_sqrt.asDiagonal() * es.eigenvectors().transpose() * dm *
                     es.eigenvectors() * inv_sqrt.asDiagonal();
      RealMatrix bs = 0.5 * (b + b.transpose());
      Eigen::SelfAdjointEigenSolver<RealMatrix> bes(bs,
                                                    Eigen::EigenvaluesOnly);
      const double lo_eig = bes.eigenvalues().minCoeff();
      if (lo_eig < 0.0) bound = std::min(bound, -1.0 / lo_eig);
    }
    return bound;
  }

  // -- KKT machinery ------------------------------------------------------------
  void build_groups();
  void factor(const Scaling& w);
  // Solves [S1 A'; A 0] [du; dy] = [ru; ry] with one refinement pass.
  void solve_kkt2(const RealVector& ru, const RealVector& ry, RealVector& du,
                  RealVector& dy) const;
  void kkt2_raw(const RealVector& ru, const RealVector& ry, RealVector& du,
                RealVector& dy) const;
  RealVector apply_S1(const RealVector& u) const;

  struct Direction {
    RealVector du, dy, dz, ds;
    double dtau = 0.0, dkappa = 0.0;
  };

  Direction solve_direction(const Scaling& w, const RealVector& r1,
                            const RealVector& r2, const RealVector& r3,
                            double r4, const RealVector& d_s, double d_tk,
                            double tau, double kappa) const;

  const IpmProblem& p_;
  SolverOptions opts_;
  Layout lo_;
  int m_;
  RealVector h_;
  double norm_b_ = 0, norm_c_ = 0, norm_h_ = 0;

  // column groups for the block-diagonal S1 = G' H^{-1} G
  std::vector<std::vector<int>> groups_;       // columns per group
  std::vector<int> col_group_;                 // column -> group
  std::vector<int> col_pos_;                   // column -> position in group
  std::vector<std::vector<int>> group_rows_;   // equality rows touching group

  // per-factorization state
  const Scaling* w_ = nullptr;
  std::vector<Eigen::LDLT<RealMatrix>> s1_fact_;
  Eigen::LDLT<RealMatrix> m_fact_;
  std::vector<RealMatrix> s1_mat_;

  // b-direction cache (depends only on the scaling)
  RealVector cached_du_b_, cached_dy_b_, cached_dz_b_;
  double cached_hHih_ = 0.0;
};

void Solver::build_groups() {
  // Union-find over columns that share a cone constraint.
  std::vector<int> parent(p_.n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

  for (const auto& blk : p_.psd)
    for (std::size_t j = 1; j < blk.cols.size(); ++j)
      unite(blk.cols[0], blk.cols[j]);
  for (const auto& row : p_.orth)
    for (std::size_t j = 1; j < row.a.entries.size(); ++j)
      unite(row.a.entries[0].first, row.a.entries[j].first);

  std::vector<int> root_to_group(p_.n, -1);
  col_group_.resize(p_.n);
  col_pos_.resize(p_.n);
  for (int c = 0; c < p_.n; ++c) {
    const int r = find(c);
    if (root_to_group[r] < 0) {
      root_to_group[r] = static_cast<int>(groups_.size());
      groups_.emplace_back();
    }
    col_group_[c] = root_to_group[r];
    col_pos_[c] = static_cast<int>(groups_[col_group_[c]].size());
    groups_[col_group_[c]].push_back(c);
  }

  group_rows_.assign(groups_.size(), {});
  for (int i = 0; i < m_; ++i) {
    std::vector<int> seen;
    for (const auto& [c, v] : p_.eq_rows[i].entries) {
      const int g = col_group_[c];
      if (std::find(seen.begin(), seen.end(), g) == seen.end()) {
        seen.push_back(g);
        group_rows_[g].push_back(i);
      }
    }
  }
}

void Solver::factor(const Scaling& w) {
  w_ = &w;
  // Assemble S1 per group.
  s1_mat_.assign(groups_.size(), RealMatrix());
  for (std::size_t g = 0; g < groups_.size(); ++g)
    s1_mat_[g] = RealMatrix::Zero(groups_[g].size(), groups_[g].size());

  for (int r = 0; r < lo_.n_orth; ++r) {
    const auto& a = p_.orth[r].a.entries;
    if (a.empty()) continue;
    const double hinv = w.identity ? 1.0 : 1.0 / w.w2_orth(r);
    const int g = col_group_[a[0].first];
    auto& s1 = s1_mat_[g];
    for (const auto& [ci, vi] : a)
      for (const auto& [cj, vj] : a)
        s1(col_pos_[ci], col_pos_[cj]) += vi * vj * hinv;
  }

  for (std::size_t k = 0; k < p_.psd.size(); ++k) {
    const auto& blk = p_.psd[k];
    if (blk.cols.empty()) continue;
    const int g = col_group_[blk.cols[0]];
    auto& s1 = s1_mat_[g];
    const std::size_t nc = blk.cols.size();
    std::vector<RealMatrix> t(nc);
    for (std::size_t j = 0; j < nc; ++j)
      t[j] = w.identity ? blk.coeff[j]
                        : RealMatrix(w.Rinv[k] * blk.coeff[j] * w.Rinv[k]);
    for (std::size_t i = 0; i < nc; ++i)
      for (std::size_t j = i; j < nc; ++j) {
        const double v = (blk.coeff[i].array() * t[j].array()).sum();
        s1(col_pos_[blk.cols[i]], col_pos_[blk.cols[j]]) += v;
        if (i != j) s1(col_pos_[blk.cols[j]], col_pos_[blk.cols[i]]) += v;
      }
  }

  s1_fact_.clear();
  s1_fact_.reserve(groups_.size());
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    // Tiny static regularization keeps boundary iterations factorable.
    s1_mat_[g].diagonal().array() +=
        1e-12 * std::max(1.0, s1_mat_[g].diagonal().maxCoeff());
    s1_fact_.emplace_back(s1_mat_[g]);
  }

  if (m_ > 0) {
    RealMatrix M = RealMatrix::Zero(m_, m_);
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const auto& rows = group_rows_[g];
      if (rows.empty()) continue;
      const int k = static_cast<int>(rows.size());
      const int nc = static_cast<int>(groups_[g].size());
      RealMatrix Ag = RealMatrix::Zero(k, nc);
      for (int i = 0; i < k; ++i)
        for (const auto& [c, v] : p_.eq_rows[rows[i]].entries)
          if (col_group_[c] == static_cast<int>(g)) Ag(i, col_pos_[c]) = v;
      RealMatrix X = s1_fact_[g].solve(Ag.transpose());
      RealMatrix upd = Ag * X;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) M(rows[i], rows[j]) += upd(i, j);
    }
    M.diagonal().array() += 1e-13 * std::max(1.0, M.diagonal().maxCoeff());
    m_fact_.compute(M);
  }
}

RealVector Solver::apply_S1(const RealVector& u) const {
  RealVector out = RealVector::Zero(p_.n);
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const auto& cols = groups_[g];
    RealVector sub(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) sub(j) = u(cols[j]);
    RealVector res = s1_mat_[g] * sub;
    for (std::size_t j = 0; j < cols.size(); ++j) out(cols[j]) = res(j);
  }
  return out;
}

void Solver::kkt2_raw(const RealVector& ru, const RealVector& ry, RealVector& du,
                      RealVector& dy) const {
  // t = S1^{-1} ru
  RealVector t = RealVector::Zero(p_.n);
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const auto& cols = groups_[g];
    RealVector sub(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) sub(j) = ru(cols[j]);
    RealVector res = s1_fact_[g].solve(sub);
    for (std::size_t j = 0; j < cols.size(); ++j) t(cols[j]) = res(j);
  }
  if (m_ > 0) {
    dy = m_fact_.solve(apply_A(t) - ry);
    const RealVector ru2 = ru - apply_At(dy);
    du = RealVector::Zero(p_.n);
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const auto& cols = groups_[g];
      RealVector sub(cols.size());
      for (std::size_t j = 0; j < cols.size(); ++j) sub(j) = ru2(cols[j]);
      RealVector res = s1_fact_[g].solve(sub);
      for (std::size_t j = 0; j < cols.size(); ++j) du(cols[j]) = res(j);
    }
  } else {
    dy = RealVector();
    du = t;
  }
}

void Solver::solve_kkt2(const RealVector& ru, const RealVector& ry, RealVector& du,
                        RealVector& dy) const {
  kkt2_raw(ru, ry, du, dy);
  for (int pass = 0; pass < 2; ++pass) {
    RealVector res_u = ru - apply_S1(du);
    if (m_ > 0) res_u -= apply_At(dy);
    RealVector res_y = m_ > 0 ? RealVector(ry - apply_A(du)) : RealVector();
    RealVector cu, cy;
    kkt2_raw(res_u, res_y, cu, cy);
    du += cu;
    if (m_ > 0) dy += cy;
  }
}

Solver::Direction Solver::solve_direction(const Scaling& w, const RealVector& r1,
                                          const RealVector& r2,
                                          const RealVector& r3, double r4,
                                          const RealVector& d_s, double d_tk,
                                          double tau, double kappa) const {
  Direction d;
  const RealVector g = lyapunov_solve(w, d_s);
  const RealVector wg = apply_W(w, g);
  const RealVector rzp = r3 + wg;

  const RealVector hinv_rzp = apply_Hinv(w, rzp);
  RealVector rhs_u_a = -r2 - apply_Gt(hinv_rzp);
  RealVector rhs_y_a = -r1;
  RealVector du_a, dy_a;
  solve_kkt2(rhs_u_a, rhs_y_a, du_a, dy_a);

  const RealVector& du_b = cached_du_b_;
  const RealVector& dy_b = cached_dy_b_;
  const RealVector& dz_b = cached_dz_b_;

  const RealVector dz_a = apply_Hinv(w, apply_G(du_a) + rzp);

  const double c_du_a = p_.c.dot(du_a);
  const double b_dy_a = m_ > 0 ? p_.b.dot(dy_a) : 0.0;
  const double h_dz_a = h_.dot(dz_a);
  const double c_du_b = p_.c.dot(du_b);
  const double b_dy_b = m_ > 0 ? p_.b.dot(dy_b) : 0.0;
  const double h_dz_b = h_.dot(dz_b);

  const double denom = c_du_b + b_dy_b + h_dz_b - kappa / tau;
  const double numer = -r4 - c_du_a - b_dy_a - h_dz_a - d_tk / tau;
  d.dtau = std::abs(denom) > 1e-300 ? numer / denom : 0.0;

  d.du = du_a + d.dtau * du_b;
  if (m_ > 0)
    d.dy = dy_a + d.dtau * dy_b;
  else
    d.dy = RealVector();
  d.dz = dz_a + d.dtau * dz_b;
  d.ds = wg - apply_H(w, d.dz);
  d.dkappa = (d_tk - kappa * d.dtau) / tau;
  return d;
}

IpmResult make_indeterminate(const std::string& why, int iters) {
  IpmResult r;
  r.status = IpmStatus::Indeterminate;
  r.note = why;
  r.iterations = iters;
  return r;
}

IpmResult Solver::solve() {
  if (lo_.total == 0)
    return make_indeterminate("problem has no conic constraints", 0);

  const RealVector e = cone_e();
  const double nu = static_cast<double>(lo_.degree);

  // Least-squares initialization with identity scaling.
  Scaling w0 = make_identity_scaling();
  factor(w0);
  RealVector u, y, s, z;
  {
    RealVector rhs_u = apply_Gt(h_);
    RealVector du, dy;
    solve_kkt2(rhs_u, p_.b, du, dy);
    u = du;
    RealVector s_t = h_ - apply_G(u);
    // shift into the interior
    double shift = 0.0;
    for (int r = 0; r < lo_.n_orth; ++r) shift = std::max(shift, -s_t(r));
    for (std::size_t k = 0; k < p_.psd.size(); ++k) {
      const RealMatrix sm = smat(s_t.data() + lo_.psd_off[k], p_.psd[k].p);
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(sm, Eigen::EigenvaluesOnly);
      shift = std::max(shift, -es.eigenvalues().minCoeff());
    }
    s = s_t + (1.0 + shift) * e;

    RealVector wv, y0;
    solve_kkt2(RealVector(-p_.c), RealVector::Zero(m_), wv, y0);
    y = y0;
    RealVector z_t = apply_G(wv);
    double dshift = 0.0;
    for (int r = 0; r < lo_.n_orth; ++r) dshift = std::max(dshift, -z_t(r));
    for (std::size_t k = 0; k < p_.psd.size(); ++k) {
      const RealMatrix zm = smat(z_t.data() + lo_.psd_off[k], p_.psd[k].p);
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(zm, Eigen::EigenvaluesOnly);
      dshift = std::max(dshift, -es.eigenvalues().minCoeff());
    }
    z = z_t + (1.0 + dshift) * e;
  }
  double tau = 1.0, kappa = 1.0;
  if (m_ == 0) y = RealVector();

  IpmResult best;
  double best_metric = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < opts_.max_iters; ++iter) {
    // residuals
    const RealVector rx = apply_At(y) + apply_Gt(z) + tau * p_.c;
    const RealVector ry = apply_A(u) - tau * p_.b;
    const RealVector rz = apply_G(u) + s - tau * h_;
    const double rt = p_.c.dot(u) + (m_ ? p_.b.dot(y) : 0.0) + h_.dot(z) + kappa;

    const double gap_inner = s.dot(z);
    const double mu = (gap_inner + tau * kappa) / (nu + 1.0);

    // convergence metrics at the de-homogenized point
    const double pcost = p_.c.dot(u) / tau;
    const double dcost = -((m_ ? p_.b.dot(y) : 0.0) + h_.dot(z)) / tau;
    const double gap = gap_inner / (tau * tau);
    const double relgap = gap / std::max(1.0, std::abs(pcost));
    const double pres =
        std::max(m_ ? (ry.cwiseAbs().maxCoeff() / tau) / (1.0 + norm_b_) : 0.0,
                 (rz.cwiseAbs().maxCoeff() / tau) / (1.0 + norm_h_));
    const double dres = (rx.cwiseAbs().maxCoeff() / tau) / (1.0 + norm_c_);

    if (opts_.verbose) {
      std::printf("%3d pcost %+12.5e dcost %+12.5e gap %8.1e pres %8.1e dres %8.1e tau %8.1e\n",
                  iter, pcost, dcost, gap, pres, dres, tau);
    }

    const double metric = std::max({pres, dres, relgap});
    const bool meets_gate = pres <= opts_.feastol && dres <= opts_.feastol &&
                            (gap <= opts_.abstol || relgap <= opts_.reltol);
    if (metric < best_metric || meets_gate) {
      best_metric = metric;
      best.u = u / tau;
      best.y = m_ ? RealVector(y / tau) : RealVector::Zero(m_);
      best.pobj = pcost;
      // Complementarity-consistent dual value: the raw dual objective of an
      // approximately feasible pair can cross the primal by the residual
      // size; pcost - gap never does, and agrees with it to within dres.
      best.dobj = pcost - gap;
      best.pres = pres;
      best.dres = dres;
      best.relgap = relgap;
      best.iterations = iter;
    }

    if (meets_gate) {
      best.status = IpmStatus::Optimal;
      return best;
    }

    // Numerical divergence after near-convergence: stop on the best iterate.
    if (best_metric < 1e-4 && metric > 1e4 * best_metric) {
      best.status = IpmStatus::Indeterminate;
      best.note =
          "diverged after reaching metric " + std::to_string(best_metric);
      return best;
    }

    // infeasibility certificates
    const double dual_ray_value = -((m_ ? p_.b.dot(y) : 0.0) + h_.dot(z));
    if (dual_ray_value > 1e-12) {
      const RealVector cert = apply_At(y) + apply_Gt(z);
      const double quality = cert.cwiseAbs().maxCoeff() / dual_ray_value;
      if (quality <= opts_.feastol * 10 && tau <= 1e-8 * std::max(1.0, kappa)) {
        best.status = IpmStatus::PrimalInfeasible;
        best.y = m_ ? RealVector(y / dual_ray_value) : RealVector::Zero(m_);
        best.u = u;
        best.cert_quality = quality;
        best.iterations = iter;
        best.note = "primal infeasibility certificate";
        return best;
      }
    }
    const double primal_ray_value = -p_.c.dot(u);
    if (primal_ray_value > 1e-12) {
      const double quality =
          std::max(m_ ? apply_A(u).cwiseAbs().maxCoeff() : 0.0,
                   (apply_G(u) + s).cwiseAbs().maxCoeff()) /
          primal_ray_value;
      if (quality <= opts_.feastol * 10 && tau <= 1e-8 * std::max(1.0, kappa)) {
        best.status = IpmStatus::DualInfeasible;
        best.u = u / primal_ray_value;
        best.y = m_ ? RealVector(y / primal_ray_value) : RealVector::Zero(m_);
        best.cert_quality = quality;
        best.iterations = iter;
        best.note = "dual infeasibility certificate (primal unbounded)";
        return best;
      }
    }

    // Newton machinery for this iterate
    const Scaling w = compute_scaling(s, z);
    factor(w);
    // cache the b-direction pieces for this scaling
    {
      const RealVector hinv_h = apply_Hinv(w, h_);
      RealVector rhs_u_b = apply_Gt(hinv_h) - p_.c;
      RealVector du_b, dy_b;
      solve_kkt2(rhs_u_b, p_.b, du_b, dy_b);
      cached_du_b_ = du_b;
      cached_dy_b_ = dy_b;
      cached_dz_b_ = apply_Hinv(w, apply_G(du_b) - h_);
    }

    // scaled lambda and lambda o lambda
    RealVector lam_vec(lo_.total);
    for (int r = 0; r < lo_.n_orth; ++r) lam_vec(r) = w.lam_orth(r);
    for (std::size_t k = 0; k < p_.psd.size(); ++k)
      svec_into(w.lam[k], lam_vec.data() + lo_.psd_off[k]);
    const RealVector lam_sq = jordan_product(lam_vec, lam_vec);

    // affine direction
    Direction aff = solve_direction(w, ry, rx, rz, rt, RealVector(-lam_sq),
                                    -tau * kappa, tau, kappa);

    const RealVector dsa_scaled = apply_Winv(w, aff.ds);
    const RealVector dza_scaled = apply_W(w, aff.dz);
    double alpha_aff = std::min(max_step(w, dsa_scaled), max_step(w, dza_scaled));
    if (aff.dtau < 0.0) alpha_aff = std::min(alpha_aff, -tau / aff.dtau);
    if (aff.dkappa < 0.0) alpha_aff = std::min(alpha_aff, -kappa / aff.dkappa);
    alpha_aff = std::min(alpha_aff, 1.0);

    const double mu_aff =
        ((s + alpha_aff * aff.ds).dot(z + alpha_aff * aff.dz) +
         (tau + alpha_aff * aff.dtau) * (kappa + alpha_aff * aff.dkappa)) /
        (nu + 1.0);
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::min(sigma, 0.99999);

    // combined direction with Mehrotra corrector
    const RealVector corr = jordan_product(dsa_scaled, dza_scaled);
    RealVector d_s = sigma * mu * e - lam_sq - corr;
    const double d_tk = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
    const double res_scale = 1.0 - sigma;
    Direction dir = solve_direction(w, RealVector(res_scale * ry),
                                    RealVector(res_scale * rx),
                                    RealVector(res_scale * rz), res_scale * rt,
                                    d_s, d_tk, tau, kappa);

    const RealVector ds_scaled = apply_Winv(w, dir.ds);
    const RealVector dz_scaled = apply_W(w, dir.dz);
    double alpha = std::min(max_step(w, ds_scaled), max_step(w, dz_scaled));
    if (dir.dtau < 0.0) alpha = std::min(alpha, -tau / dir.dtau);
    if (dir.dkappa < 0.0) alpha = std::min(alpha, -kappa / dir.dkappa);
    alpha = std::min(opts_.step_scale * alpha, 1.0);

    if (!std::isfinite(alpha) || alpha < 1e-9) {
      best.note = "step length collapsed (alpha " + std::to_string(alpha) + ")";
      best.status = IpmStatus::Indeterminate;
      best.iterations = iter;
      return best;
    }

    u += alpha * dir.du;
    if (m_ > 0) y += alpha * dir.dy;
    s += alpha * dir.ds;
    z += alpha * dir.dz;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;

    if (tau < 1e-300 || !std::isfinite(tau)) {
      best.note = "tau collapsed without certificate";
      best.status = IpmStatus::Indeterminate;
      best.iterations = iter;
      return best;
    }
  }

  best.status = IpmStatus::Indeterminate;
  best.note = "iteration limit reached (best metric " +
              std::to_string(best_metric) + ")";
  return best;
}

}  // namespace

IpmResult EmbeddedIpm::run(const IpmProblem& p, const SolverOptions& opts) {
  Solver solver(p, opts);
  return solver.solve();
}

}  // namespace mdiq::conic
