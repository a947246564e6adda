#include "mdiq/sdp_common.hpp"

#include <numeric>

#include "mdiq/linalg.hpp"

namespace mdiq::detail {

namespace {

std::vector<long> strides_of(const std::vector<int>& dims) {
  std::vector<long> s(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
    s[i] = s[i + 1] * dims[i + 1];
  return s;
}

}  // namespace

std::vector<ComplexMatrix> identity_factor_coeffs(const std::vector<int>& dims,
                                                  int factor) {
  const int nf = static_cast<int>(dims.size());
  if (factor < 0 || factor >= nf)
    throw std::invalid_argument("identity_factor_coeffs: bad factor");
  const int df = dims[factor];
  const long D = std::accumulate(dims.begin(), dims.end(), 1L,
                                 std::multiplies<long>());
  const long drest = D / df;
  const auto st = strides_of(dims);

  std::vector<int> rest_dims;
  std::vector<int> rest_idx;
  for (int i = 0; i < nf; ++i)
    if (i != factor) {
      rest_dims.push_back(dims[i]);
      rest_idx.push_back(i);
    }
  const auto rst = strides_of(rest_dims);
  auto compose = [&](int fv, long rv) {
    long idx = fv * st[factor];
    for (std::size_t a = 0; a < rest_dims.size(); ++a)
      idx += ((rv / rst[a]) % rest_dims[a]) * st[rest_idx[a]];
    return idx;
  };

  std::vector<ComplexMatrix> out;
  // off-blocks between distinct factor values must vanish
  for (int rf = 0; rf < df; ++rf)
    for (int cf = rf + 1; cf < df; ++cf)
      for (long rr = 0; rr < drest; ++rr)
        for (long cc = 0; cc < drest; ++cc) {
          const int r = static_cast<int>(compose(rf, rr));
          const int c = static_cast<int>(compose(cf, cc));
          out.push_back(herm_unit_re(static_cast<int>(D), r, c));
          out.push_back(herm_unit_im(static_cast<int>(D), r, c));
        }
  // diagonal blocks must agree
  for (int j = 1; j < df; ++j)
    for (long rr = 0; rr < drest; ++rr)
      for (long cc = rr; cc < drest; ++cc) {
        const int r0 = static_cast<int>(compose(0, rr));
        const int c0 = static_cast<int>(compose(0, cc));
        const int rj = static_cast<int>(compose(j, rr));
        const int cj = static_cast<int>(compose(j, cc));
        if (rr == cc) {
          ComplexMatrix m = ComplexMatrix::Zero(D, D);
          m(r0, c0) += 1.0;
          m(rj, cj) -= 1.0;
          out.push_back(m);
        } else {
          out.push_back(herm_unit_re(static_cast<int>(D), r0, c0) -
                        herm_unit_re(static_cast<int>(D), rj, cj));
          out.push_back(herm_unit_im(static_cast<int>(D), r0, c0) -
                        herm_unit_im(static_cast<int>(D), rj, cj));
        }
      }
  return out;
}

std::vector<ComplexMatrix> trace_proportional_coeffs(int dim) {
  std::vector<ComplexMatrix> out;
  for (int r = 0; r < dim; ++r)
    for (int c = r + 1; c < dim; ++c) {
      out.push_back(herm_unit_re(dim, r, c));
      out.push_back(herm_unit_im(dim, r, c));
    }
  for (int r = 0; r + 1 < dim; ++r) {
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    m(r, r) += 1.0;
    m(r + 1, r + 1) -= 1.0;
    out.push_back(m);
  }
  return out;
}

FamilyHandle declare_family(conic::ConicProblem& p, const std::string& prefix,
                            int count, const std::vector<int>& joint_factors,
                            const FamilySpec& spec) {
  FamilyHandle fam;
  fam.joint_factors = joint_factors;
  fam.joint_dim = std::accumulate(joint_factors.begin(), joint_factors.end(), 1,
                                  std::multiplies<int>());
  fam.lift = [](const ComplexMatrix& c) { return c; };
  for (int i = 0; i < count; ++i) {
    auto v = p.add_psd_var(prefix + "_" + std::to_string(i), fam.joint_dim);
    switch (spec.cone) {
      case FamilyCone::Plain:
        break;
      case FamilyCone::PtFactor:
        p.add_pt_cone(v, joint_factors, {spec.pt_factor});
        break;
      case FamilyCone::PtAll:
        for (int f = 0; f < static_cast<int>(joint_factors.size()); ++f)
          p.add_pt_cone(v, joint_factors, {f});
        break;
    }
    fam.vars.push_back(v);
  }
  return fam;
}

FamilyHandle declare_symext_family(conic::ConicProblem& p,
                                   const std::string& prefix, int count,
                                   int d0, int d1, int k, bool with_ppt) {
  if (k < 2 || k > 3)
    throw std::invalid_argument("symmetric extension order must be 2 or 3");
  std::vector<int> ext_factors = {d0};
  for (int i = 0; i < k; ++i) ext_factors.push_back(d1);
  const int ext_dim = std::accumulate(ext_factors.begin(), ext_factors.end(), 1,
                                      std::multiplies<int>());
  const auto st = strides_of(ext_factors);

  FamilyHandle fam;
  fam.joint_factors = {d0, d1};
  fam.joint_dim = d0 * d1;
  const int copies_dim = ext_dim / (d0 * d1);
  fam.lift = [copies_dim](const ComplexMatrix& c) {
    return kron_raw(c, ComplexMatrix::Identity(copies_dim, copies_dim));
  };

  // permutation of a full index swapping adjacent copies (factors f, f+1)
  auto swap_idx = [&](long idx, int f) {
    const long a = (idx / st[f]) % ext_factors[f];
    const long b = (idx / st[f + 1]) % ext_factors[f + 1];
    return idx + (b - a) * st[f] + (a - b) * st[f + 1];
  };

  for (int i = 0; i < count; ++i) {
    auto v = p.add_psd_var(prefix + "_" + std::to_string(i), ext_dim);
    // symmetry under each adjacent transposition of the copies:
    // N[(r, c)] = N[(swap r, swap c)], one equality row per entry orbit
    for (int f = 1; f + 1 <= k; ++f) {
      for (long r = 0; r < ext_dim; ++r)
        for (long c = r; c < ext_dim; ++c) {
          long r2 = swap_idx(r, f), c2 = swap_idx(c, f);
          double im_sign = 1.0;
          if (r2 > c2) {
            std::swap(r2, c2);
            im_sign = -1.0;  // image entry read through Hermitian conjugate
          }
          if (r2 == r && c2 == c) {
            if (im_sign < 0 && r != c)  // entry equals its own conjugate
              p.add_equality(
                  conic::LinExpr().add(v, herm_unit_im(ext_dim, (int)r, (int)c)),
                  0.0);
            continue;
          }
          if (std::make_pair(r, c) > std::make_pair(r2, c2))
            continue;  // the partner pair emits this orbit's rows
          if (r == c) {
            ComplexMatrix m = ComplexMatrix::Zero(ext_dim, ext_dim);
            m(r, c) += 1.0;
            m(r2, c2) -= 1.0;
            p.add_equality(conic::LinExpr().add(v, m), 0.0);
          } else {
            p.add_equality(
                conic::LinExpr().add(
                    v, ComplexMatrix(herm_unit_re(ext_dim, (int)r, (int)c) -
                                     herm_unit_re(ext_dim, (int)r2, (int)c2))),
                0.0);
            p.add_equality(
                conic::LinExpr().add(
                    v, ComplexMatrix(herm_unit_im(ext_dim, (int)r, (int)c) -
                                     im_sign * herm_unit_im(ext_dim, (int)r2,
                                                            (int)c2))),
                0.0);
          }
        }
    }
    if (with_ppt) {
      std::vector<int> cut = {0};
      p.add_pt_cone(v, ext_factors, cut);
      for (int extra = 1; extra < k; ++extra) {
        cut.push_back(extra);
        p.add_pt_cone(v, ext_factors, cut);
      }
    }
    fam.vars.push_back(v);
  }
  return fam;
}

void add_identity_factor_rows(conic::ConicProblem& p, const FamilyHandle& fam,
                              const std::vector<std::size_t>& members,
                              int factor) {
  for (const auto& coeff : identity_factor_coeffs(fam.joint_factors, factor)) {
    conic::LinExpr e;
    for (auto m : members) fam.add_term(e, m, coeff);
    p.add_equality(std::move(e), 0.0);
  }
}

void add_trace_proportional_rows(conic::ConicProblem& p, const FamilyHandle& fam,
                                 const std::vector<std::size_t>& members) {
  for (const auto& coeff : trace_proportional_coeffs(fam.joint_dim)) {
    conic::LinExpr e;
    for (auto m : members) fam.add_term(e, m, coeff);
    p.add_equality(std::move(e), 0.0);
  }
}

}  // namespace mdiq::detail
