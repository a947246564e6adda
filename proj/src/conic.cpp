#include "mdiq/conic.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "mdiq/herm_basis.hpp"

namespace mdiq::conic {

namespace {

constexpr double kCoeffHermTol = 1e-10;
constexpr double kDropTol = 1e-14;
constexpr double kPivotTol = 1e-10;      // squared-residual pivot threshold
constexpr double kConsistencyTol = 1e-7;
// Bias on the two halves of a free-scalar split. Keeps the optimal face
// bounded (both halves drift up otherwise); perturbs optima by ~1e-9 |value|,
// well inside every reported tolerance.
constexpr double kFreeSplitBias = 1e-9;

RealMatrix realify_raw(const ComplexMatrix& h) {
  const int d = static_cast<int>(h.rows());
  RealMatrix out(2 * d, 2 * d);
  const RealMatrix re = h.real();
  const RealMatrix im = h.imag();
  out.topLeftCorner(d, d) = re;
  out.bottomRightCorner(d, d) = re;
  out.topRightCorner(d, d) = -im;
  out.bottomLeftCorner(d, d) = im;
  return out;
}

void check_hermitian(const ComplexMatrix& c, const char* where) {
  if (c.rows() != c.cols() ||
      (c - c.adjoint()).cwiseAbs().maxCoeff() > kCoeffHermTol)
    throw std::invalid_argument(std::string(where) +
                                ": coefficient matrix must be Hermitian");
}

// Basis matrices for real symmetric variables: diagonal units first, then
// (E_ij + E_ji)/sqrt(2) in row-major pair order.
int real_sym_coords(int d) { return d * (d + 1) / 2; }

RealMatrix real_sym_basis(int d, int k) {
  RealMatrix b = RealMatrix::Zero(d, d);
  if (k < d) {
    b(k, k) = 1.0;
    return b;
  }
  k -= d;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      if (k == 0) {
        b(i, j) = b(j, i) = 1.0 / std::sqrt(2.0);
        return b;
      }
      --k;
    }
  throw std::logic_error("real_sym_basis: index out of range");
}

RealVector real_sym_coords_of(const RealMatrix& c) {
  const int d = static_cast<int>(c.rows());
  RealVector u(real_sym_coords(d));
  int k = 0;
  for (int i = 0; i < d; ++i) u(k++) = c(i, i);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) u(k++) = std::sqrt(2.0) * c(i, j);
  return u;
}

struct DedupResult {
  std::vector<int> kept;
  bool inconsistent = false;
  std::vector<double> cert;
  double violation = 0.0;
};

// Rank-revealing pass over the (row-normalized) equality rows via pivoted
// Cholesky of the Gram matrix. Consistent dependent rows are dropped;
// inconsistent dependence yields a linear infeasibility certificate.
DedupResult dedup_rows(const std::vector<SparseVec>& rows, const RealVector& b,
                       int n) {
  const int m = static_cast<int>(rows.size());
  DedupResult out;
  if (m == 0) return out;

  // Gram via column buckets.
  std::vector<std::vector<std::pair<int, double>>> cols(n);
  for (int i = 0; i < m; ++i)
    for (const auto& [c, v] : rows[i].entries) cols[c].emplace_back(i, v);
  RealMatrix G = RealMatrix::Zero(m, m);
  for (int c = 0; c < n; ++c)
    for (std::size_t a = 0; a < cols[c].size(); ++a)
      for (std::size_t bb = 0; bb < cols[c].size(); ++bb)
        G(cols[c][a].first, cols[c][bb].first) +=
            cols[c][a].second * cols[c][bb].second;

  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  int rank = 0;
  for (int t = 0; t < m; ++t) {
    int piv = t;
    for (int i = t + 1; i < m; ++i)
      if (G(perm[i], perm[i]) > G(perm[piv], perm[piv])) piv = i;
    if (G(perm[piv], perm[piv]) < kPivotTol) break;
    std::swap(perm[t], perm[piv]);
    const int pt = perm[t];
    const double root = std::sqrt(G(pt, pt));
    G(pt, pt) = root;
    for (int i = t + 1; i < m; ++i) {
      const int pi = perm[i];
      G(pi, pt) /= root;
    }
    for (int i = t + 1; i < m; ++i)
      for (int j = t + 1; j <= i; ++j) {
        const int pi = perm[i], pj = perm[j];
        G(pi, pj) -= G(pi, pt) * G(pj, pt);
        G(pj, pi) = G(pi, pj);
      }
    ++rank;
  }

  if (rank == m) {
    out.kept = perm;
    std::sort(out.kept.begin(), out.kept.end());
    return out;
  }

  // gamma: forward solve L gamma = b over the kept pivots
  RealVector gamma(rank);
  for (int t = 0; t < rank; ++t) {
    double acc = b(perm[t]);
    for (int k = 0; k < t; ++k) acc -= G(perm[t], perm[k]) * gamma(k);
    gamma(t) = acc / G(perm[t], perm[t]);
  }

  for (int q = rank; q < m; ++q) {
    double predicted = 0.0;
    for (int k = 0; k < rank; ++k) predicted += G(perm[q], perm[k]) * gamma(k);
    const double resid = b(perm[q]) - predicted;
    if (std::abs(resid) > kConsistencyTol * (1.0 + std::abs(b(perm[q])))) {
      // Certificate: y with A'y ~ 0 and b'y = -1.
      RealVector w(rank);
      for (int t = rank - 1; t >= 0; --t) {
        double acc = G(perm[q], perm[t]);
        for (int k = t + 1; k < rank; ++k) acc -= G(perm[k], perm[t]) * w(k);
        w(t) = acc / G(perm[t], perm[t]);
      }
      out.inconsistent = true;
      out.cert.assign(m, 0.0);
      const double scale = -1.0 / resid;
      out.cert[perm[q]] = scale;
      for (int t = 0; t < rank; ++t) out.cert[perm[t]] = -w(t) * scale;
      out.violation = std::abs(resid);
      return out;
    }
  }

  out.kept.assign(perm.begin(), perm.begin() + rank);
  std::sort(out.kept.begin(), out.kept.end());
  return out;
}

}  // namespace

void ConicProblem::check_var(VarId v, bool want_scalar) const {
  if (v.idx < 0 || v.idx >= static_cast<int>(vars_.size()))
    throw std::invalid_argument("conic: reference to undeclared variable");
  if (vars_[v.idx].scalar != want_scalar)
    throw std::invalid_argument("conic: variable kind mismatch");
}

VarId ConicProblem::add_psd_var(const std::string& label, int dim,
                                bool complex_herm) {
  if (dim < 1) throw std::invalid_argument("add_psd_var: dim must be >= 1");
  if (label_index_.count(label))
    throw std::invalid_argument("add_psd_var: duplicate label '" + label + "'");
  VarDecl d;
  d.label = label;
  d.dim = dim;
  d.complex_herm = complex_herm;
  d.scalar = false;
  d.coord_offset = n_coords_;
  d.coord_count = complex_herm ? dim * dim : real_sym_coords(dim);
  n_coords_ += d.coord_count;
  label_index_[label] = static_cast<int>(vars_.size());
  vars_.push_back(std::move(d));
  return {static_cast<int>(vars_.size()) - 1};
}

VarId ConicProblem::add_free_scalar(const std::string& label) {
  if (label_index_.count(label))
    throw std::invalid_argument("add_free_scalar: duplicate label '" + label +
                                "'");
  VarDecl d;
  d.label = label;
  d.scalar = true;
  d.coord_offset = n_coords_;
  d.coord_count = 2;  // split into a difference of two nonnegatives
  n_coords_ += 2;
  label_index_[label] = static_cast<int>(vars_.size());
  vars_.push_back(std::move(d));
  return {static_cast<int>(vars_.size()) - 1};
}

int ConicProblem::add_equality(LinExpr e, double rhs) {
  for (const auto& [v, c] : e.mat_terms) {
    check_var(v, false);
    check_hermitian(c, "add_equality");
    if (c.rows() != vars_[v.idx].dim)
      throw std::invalid_argument("add_equality: coefficient dimension mismatch");
  }
  for (const auto& [v, c] : e.scalar_terms) {
    (void)c;
    check_var(v, true);
  }
  rows_.push_back({std::move(e), rhs});
  return static_cast<int>(rows_.size()) - 1;
}

void ConicProblem::set_objective(Sense sense, LinExpr e) {
  for (const auto& [v, c] : e.mat_terms) {
    check_var(v, false);
    check_hermitian(c, "set_objective");
  }
  for (const auto& [v, c] : e.scalar_terms) {
    (void)c;
    check_var(v, true);
  }
  sense_ = sense;
  objective_ = std::move(e);
  has_objective_ = true;
}

void ConicProblem::add_lmi(MatExpr e) {
  if (e.const_part.size() > 0) check_hermitian(e.const_part, "add_lmi");
  for (const auto& [v, map] : e.mat_terms) {
    (void)map;
    check_var(v, false);
  }
  for (const auto& [v, c] : e.scalar_terms) {
    check_var(v, true);
    check_hermitian(c, "add_lmi");
  }
  lmis_.push_back(std::move(e));
}

void ConicProblem::add_pt_cone(VarId v, const std::vector<int>& factors,
                               const std::vector<int>& transpose_factors) {
  check_var(v, false);
  if (!vars_[v.idx].complex_herm)
    throw std::invalid_argument("add_pt_cone: complex Hermitian variable required");
  int prod = 1;
  for (int f : factors) prod *= f;
  if (prod != vars_[v.idx].dim)
    throw std::invalid_argument("add_pt_cone: factor product mismatch");
  if (transpose_factors.empty())
    throw std::invalid_argument("add_pt_cone: no factors to transpose");
  for (int factor : transpose_factors)
    if (factor < 0 || factor >= static_cast<int>(factors.size()))
      throw std::invalid_argument("add_pt_cone: factor index out of range");
  pt_cones_.push_back({v, factors, transpose_factors});
}

namespace {

// Sparse row assembly shared by equalities and the objective.
void accumulate_expr(const ConicProblem& cp, const LinExpr& e,
                     std::vector<double>& dense) {
  for (const auto& [v, c] : e.mat_terms) {
    const auto& d = cp.decl(v);
    RealVector coords;
    if (d.complex_herm) {
      coords = HermBasis(d.dim).coords(c);
    } else {
      if (c.imag().cwiseAbs().maxCoeff() > kCoeffHermTol)
        throw std::invalid_argument(
            "conic: real symmetric variable with complex coefficient");
      coords = real_sym_coords_of(c.real());
    }
    for (int k = 0; k < coords.size(); ++k) dense[d.coord_offset + k] += coords(k);
  }
  for (const auto& [v, coef] : e.scalar_terms) {
    const auto& d = cp.decl(v);
    dense[d.coord_offset] += coef;
    dense[d.coord_offset + 1] -= coef;
  }
}

SparseVec sparsify(const std::vector<double>& dense) {
  SparseVec out;
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (std::abs(dense[i]) > kDropTol)
      out.add(static_cast<int>(i), dense[i]);
  return out;
}

}  // namespace

IpmProblem ConicProblem::compile() const {
  IpmProblem p;
  p.n = n_coords_;
  p.c = RealVector::Zero(n_coords_);
  if (has_objective_) {
    std::vector<double> dense(n_coords_, 0.0);
    accumulate_expr(*this, objective_, dense);
    const double sgn = sense_ == Sense::Max ? -1.0 : 1.0;
    for (int i = 0; i < n_coords_; ++i) p.c(i) = sgn * dense[i];
    for (const auto& d : vars_)
      if (d.scalar) {
        p.c(d.coord_offset) += kFreeSplitBias;
        p.c(d.coord_offset + 1) += kFreeSplitBias;
      }
  }

  p.b = RealVector::Zero(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    std::vector<double> dense(n_coords_, 0.0);
    accumulate_expr(*this, rows_[i].expr, dense);
    p.eq_rows.push_back(sparsify(dense));
    p.b(static_cast<int>(i)) = rows_[i].rhs;
  }

  // Membership cones of the declared variables.
  for (const auto& d : vars_) {
    if (d.scalar) {
      for (int k = 0; k < 2; ++k) {
        OrthRow r;
        r.a.add(d.coord_offset + k, -1.0);
        r.h = 0.0;
        p.orth.push_back(std::move(r));
      }
      continue;
    }
    PsdConeRows blk;
    if (d.complex_herm) {
      HermBasis basis(d.dim);
      blk.p = 2 * d.dim;
      for (int k = 0; k < basis.size(); ++k) {
        RealVector e = RealVector::Zero(basis.size());
        e(k) = 1.0;
        blk.cols.push_back(d.coord_offset + k);
        blk.coeff.push_back(-realify_raw(basis.matrix(e)));
      }
    } else {
      blk.p = d.dim;
      for (int k = 0; k < d.coord_count; ++k) {
        blk.cols.push_back(d.coord_offset + k);
        blk.coeff.push_back(-real_sym_basis(d.dim, k));
      }
    }
    blk.h = RealMatrix::Zero(blk.p, blk.p);
    p.psd.push_back(std::move(blk));
  }

  // Partial-transpose cones.
  for (const auto& pt : pt_cones_) {
    const auto& d = vars_[pt.v.idx];
    HermBasis basis(d.dim);
    PsdConeRows blk;
    blk.p = 2 * d.dim;
    for (int k = 0; k < basis.size(); ++k) {
      RealVector e = RealVector::Zero(basis.size());
      e(k) = 1.0;
      ComplexMatrix bt = basis.matrix(e);
      for (int factor : pt.transpose_factors)
        bt = partial_transpose_raw(bt, pt.factors, factor);
      blk.cols.push_back(d.coord_offset + k);
      blk.coeff.push_back(-realify_raw(bt));
    }
    blk.h = RealMatrix::Zero(blk.p, blk.p);
    p.psd.push_back(std::move(blk));
  }

  // General linear matrix inequalities.
  for (const auto& lmi : lmis_) {
    const int D = lmi.dim();
    PsdConeRows blk;
    blk.p = 2 * D;
    std::map<int, RealMatrix> col_coeff;
    for (const auto& [v, map] : lmi.mat_terms) {
      const auto& d = vars_[v.idx];
      if (!d.complex_herm)
        throw std::invalid_argument("add_lmi: complex Hermitian variable required");
      HermBasis basis(d.dim);
      for (int k = 0; k < basis.size(); ++k) {
        RealVector e = RealVector::Zero(basis.size());
        e(k) = 1.0;
        ComplexMatrix img = map(basis.matrix(e));
        if (img.rows() != D)
          throw std::invalid_argument("add_lmi: term dimension mismatch");
        check_hermitian(img, "add_lmi term");
        RealMatrix f = -realify_raw(img);
        if (f.cwiseAbs().maxCoeff() < kDropTol) continue;
        auto [it, fresh] = col_coeff.try_emplace(d.coord_offset + k, f);
        if (!fresh) it->second += f;
      }
    }
    for (const auto& [v, c] : lmi.scalar_terms) {
      const auto& d = vars_[v.idx];
      RealMatrix f = -realify_raw(c);
      auto [it0, fresh0] = col_coeff.try_emplace(d.coord_offset, f);
      if (!fresh0) it0->second += f;
      auto [it1, fresh1] = col_coeff.try_emplace(d.coord_offset + 1, RealMatrix(-f));
      if (!fresh1) it1->second += -f;
    }
    for (auto& [col, f] : col_coeff) {
      blk.cols.push_back(col);
      blk.coeff.push_back(std::move(f));
    }
    blk.h = lmi.const_part.size() > 0 ? realify_raw(lmi.const_part)
                                      : RealMatrix::Zero(2 * D, 2 * D);
    p.psd.push_back(std::move(blk));
  }

  return p;
}

SolveReport solve(const ConicProblem& cp, const SolverOptions& opts,
                  SolverBackend* backend) {
  const auto t0 = std::chrono::steady_clock::now();
  EmbeddedIpm embedded;
  SolverBackend* be = backend ? backend : &embedded;

  SolveReport rep;
  if (cp.num_vars() == 0) {
    rep.status = SolveStatus::Indeterminate;
    rep.diagnostics = "no variables declared";
    return rep;
  }

  IpmProblem full = cp.compile();
  const int m_orig = static_cast<int>(full.eq_rows.size());
  const std::vector<SparseVec> all_rows_normalized = [&] {
    std::vector<SparseVec> rows(m_orig);
    for (int i = 0; i < m_orig; ++i) {
      double norm2 = 0.0;
      for (const auto& [c, v] : full.eq_rows[i].entries) norm2 += v * v;
      const double norm = std::max(std::sqrt(norm2), 1e-300);
      for (const auto& [c, v] : full.eq_rows[i].entries)
        rows[i].add(c, v / norm);
    }
    return rows;
  }();
  RealVector all_b_normalized = full.b;

  // Normalize rows; drop trivial zero rows (infeasible if rhs nonzero).
  std::vector<int> active;      // active row -> original row
  std::vector<double> norms(m_orig, 1.0);
  {
    std::vector<SparseVec> rows;
    std::vector<double> bvals;
    for (int i = 0; i < m_orig; ++i) {
      double norm2 = 0.0;
      for (const auto& [c, v] : full.eq_rows[i].entries) norm2 += v * v;
      const double norm = std::sqrt(norm2);
      if (norm < kDropTol) {
        if (std::abs(full.b(i)) > 1e-12) {
          rep.status = SolveStatus::InfeasibleCertified;
          rep.dual_values.assign(m_orig, 0.0);
          rep.dual_values[i] = -1.0 / full.b(i);
          rep.diagnostics = "equality row with zero coefficients and nonzero rhs";
          return rep;
        }
        all_b_normalized(i) = 0.0;
        continue;
      }
      norms[i] = norm;
      all_b_normalized(i) = full.b(i) / norm;
      SparseVec r;
      for (const auto& [c, v] : full.eq_rows[i].entries) r.add(c, v / norm);
      rows.push_back(std::move(r));
      bvals.push_back(full.b(i) / norm);
      active.push_back(i);
    }
    full.eq_rows = std::move(rows);
    full.b = Eigen::Map<RealVector>(bvals.data(), bvals.size());
  }

  // Rank-revealing presolve.
  std::vector<int> kept_active(active.size());
  std::iota(kept_active.begin(), kept_active.end(), 0);
  if (opts.presolve_dedup && !full.eq_rows.empty()) {
    DedupResult dd = dedup_rows(full.eq_rows, full.b, full.n);
    if (dd.inconsistent) {
      rep.status = SolveStatus::InfeasibleCertified;
      rep.dual_values.assign(m_orig, 0.0);
      for (std::size_t i = 0; i < dd.cert.size(); ++i)
        rep.dual_values[active[i]] = dd.cert[i] / norms[active[i]];
      rep.diagnostics = "equality system linearly inconsistent (violation " +
                        std::to_string(dd.violation) + ")";
      const auto t1 = std::chrono::steady_clock::now();
      rep.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      return rep;
    }
    if (dd.kept.size() < full.eq_rows.size()) {
      std::vector<SparseVec> rows;
      std::vector<double> bvals;
      std::vector<int> new_active;
      for (int i : dd.kept) {
        rows.push_back(full.eq_rows[i]);
        bvals.push_back(full.b(i));
        new_active.push_back(active[i]);
      }
      full.eq_rows = std::move(rows);
      full.b = Eigen::Map<RealVector>(bvals.data(), bvals.size());
      active = std::move(new_active);
    }
  }

  IpmResult res = be->run(full, opts);
  const auto t1 = std::chrono::steady_clock::now();
  rep.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  rep.iterations = res.iterations;
  rep.diagnostics = res.note;

  switch (res.status) {
    case IpmStatus::Optimal: {
      rep.status = SolveStatus::Optimal;
      break;
    }
    case IpmStatus::PrimalInfeasible: {
      rep.status = SolveStatus::InfeasibleCertified;
      rep.dual_values.assign(m_orig, 0.0);
      for (std::size_t i = 0; i < active.size(); ++i)
        rep.dual_values[active[i]] = res.y(static_cast<int>(i)) / norms[active[i]];
      rep.diagnostics = "primal infeasibility certificate (quality " +
                        std::to_string(res.cert_quality) + ")";
      return rep;
    }
    case IpmStatus::DualInfeasible: {
      rep.status = SolveStatus::Indeterminate;
      rep.diagnostics = "primal unbounded (dual infeasibility certificate); " +
                        res.note;
      return rep;
    }
    case IpmStatus::Indeterminate: {
      rep.status = SolveStatus::Indeterminate;
      return rep;
    }
  }

  // Optimal: map values back.
  rep.psd_values.clear();
  rep.scalar_values.clear();
  for (int vi = 0; vi < cp.num_vars(); ++vi) {
    const auto& d = cp.decl({vi});
    if (d.scalar) {
      rep.scalar_values.push_back(res.u(d.coord_offset) - res.u(d.coord_offset + 1));
      continue;
    }
    if (d.complex_herm) {
      HermBasis basis(d.dim);
      rep.psd_values.push_back(
          basis.matrix(res.u.segment(d.coord_offset, d.coord_count)));
    } else {
      RealMatrix acc = RealMatrix::Zero(d.dim, d.dim);
      for (int k = 0; k < d.coord_count; ++k)
        acc += res.u(d.coord_offset + k) * real_sym_basis(d.dim, k);
      rep.psd_values.push_back(acc.cast<Complex>());
    }
  }

  rep.dual_values.assign(m_orig, 0.0);
  for (std::size_t i = 0; i < active.size(); ++i)
    rep.dual_values[active[i]] = res.y(static_cast<int>(i)) / norms[active[i]];

  // residuals over all original (normalized) rows
  {
    double worst = 0.0;
    for (int i = 0; i < m_orig; ++i) {
      double acc = 0.0;
      for (const auto& [c, v] : all_rows_normalized[i].entries)
        acc += v * res.u(c);
      worst = std::max(worst, std::abs(acc - all_b_normalized(i)));
    }
    rep.primal_residual = worst;
  }

  const bool maximize = cp.has_objective() && cp.sense_ == Sense::Max;
  rep.objective = maximize ? -res.pobj : res.pobj;
  rep.dual_objective = maximize ? -res.dobj : res.dobj;
  rep.duality_gap = std::abs(res.pobj - res.dobj);
  if (maximize)
    for (auto& y : rep.dual_values) y = -y;
  return rep;
}

CertificationResult solve_feasibility(const ConicProblem& cp,
                                      const SolverOptions& opts,
                                      SolverBackend* backend) {
  const auto t0 = std::chrono::steady_clock::now();
  EmbeddedIpm embedded;
  SolverBackend* be = backend ? backend : &embedded;

  CertificationResult out;
  if (cp.num_equalities() == 0)
    throw std::invalid_argument("solve_feasibility: no equality constraints");

  IpmProblem base = cp.compile();
  const int m_orig = static_cast<int>(base.eq_rows.size());

  // Normalize rows so the slack bound is a relative violation.
  std::vector<double> norms(m_orig, 1.0);
  for (int i = 0; i < m_orig; ++i) {
    double norm2 = 0.0;
    for (const auto& [c, v] : base.eq_rows[i].entries) norm2 += v * v;
    const double norm = std::sqrt(std::max(norm2, 1e-300));
    if (norm < kDropTol) continue;  // zero row: slack absorbs any rhs
    norms[i] = norm;
    for (auto& [c, v] : base.eq_rows[i].entries) v /= norm;
    base.b(i) /= norm;
  }

  // Phase-I: minimize s subject to
  //   <a_i, u> + p_i - q_i = b_i,   p_i + q_i + r_i - s = 0,
  //   p, q, r, s >= 0, cones of the base problem exact.
  IpmProblem ph;
  const int n0 = base.n;
  ph.n = n0 + 3 * m_orig + 1;
  const int s_col = n0 + 3 * m_orig;
  ph.c = RealVector::Zero(ph.n);
  ph.c(s_col) = 1.0;

  ph.eq_rows.reserve(2 * m_orig);
  std::vector<double> bvals;
  for (int i = 0; i < m_orig; ++i) {
    SparseVec r = base.eq_rows[i];
    r.add(n0 + i, 1.0);
    r.add(n0 + m_orig + i, -1.0);
    ph.eq_rows.push_back(std::move(r));
    bvals.push_back(base.b(i));
  }
  for (int i = 0; i < m_orig; ++i) {
    SparseVec r;
    r.add(n0 + i, 1.0);
    r.add(n0 + m_orig + i, 1.0);
    r.add(n0 + 2 * m_orig + i, 1.0);
    r.add(s_col, -1.0);
    ph.eq_rows.push_back(std::move(r));
    bvals.push_back(0.0);
  }
  ph.b = Eigen::Map<RealVector>(bvals.data(), bvals.size());

  ph.orth = base.orth;
  for (int k = 0; k < 3 * m_orig + 1; ++k) {
    OrthRow r;
    r.a.add(n0 + k, -1.0);
    ph.orth.push_back(std::move(r));
  }
  ph.psd = base.psd;

  SolverOptions ph_opts = opts;
  ph_opts.presolve_dedup = false;  // slack columns make rows independent
  IpmResult res = be->run(ph, ph_opts);
  const auto t1 = std::chrono::steady_clock::now();
  out.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  out.iterations = res.iterations;
  out.diagnostics = res.note;

  if (res.status != IpmStatus::Optimal) {
    out.verdict = Verdict::Indeterminate;
    out.diagnostics = "phase-I not solved to optimality: " + res.note;
    return out;
  }

  out.margin = std::max(0.0, res.pobj);
  out.dual_values.assign(m_orig, 0.0);
  for (int i = 0; i < m_orig; ++i) out.dual_values[i] = res.y(i) / norms[i];

  if (out.margin <= kFeasibleMargin)
    out.verdict = Verdict::Feasible;
  else if (out.margin >= kInfeasibleMargin)
    out.verdict = Verdict::Infeasible;
  else
    out.verdict = Verdict::Indeterminate;
  return out;
}

}  // namespace mdiq::conic
