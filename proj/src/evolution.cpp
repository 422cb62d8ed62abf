#include "canonkit/evolution.hpp"

#include <algorithm>
#include <sstream>

#include "canonkit/errors.hpp"

namespace canonkit {

namespace {

double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

void check_move_bases(const QuadraticMove& move, const ClassifiedBasis& from, const ClassifiedBasis& to) {
    const Index q = move.dim();
    if (from.dim() != q || to.dim() != q) throw InputError("basis dimension does not match the move");
    if (from.step != move.step_from || to.step != move.step_to)
        throw InputError("bases are not classified for the steps of the move");
}

Matrix invert_block(const Matrix& m, const char* what, int step) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << what << " at step " << step << " is not square (" << m.rows() << "x" << m.cols()
           << "): classification inconsistency";
        throw DegeneracyError(os.str());
    }
    if (m.size() == 0) return m;
    Eigen::FullPivLU<Matrix> lu(m);
    Eigen::JacobiSVD<Matrix> svd(m);
    const Vector& s = svd.singularValues();
    if (!(s(s.size() - 1) > 1e-12 * s(0))) {
        std::ostringstream os;
        os << what << " at step " << step << " is singular: classification inconsistency";
        throw DegeneracyError(os.str());
    }
    return lu.inverse();
}

void report_violation(const std::string& name, double residual, const SolveOptions& opt,
                      std::vector<std::string>& warnings) {
    std::ostringstream os;
    os << "constraint " << name << " violated (residual " << residual << ")";
    if (opt.strict) throw ConstraintError(os.str());
    warnings.push_back(os.str());
}

std::string constraint_name(const char* prefix, int step, const ClassifiedBasis& b, Index row) {
    std::ostringstream os;
    os << prefix << step << "_" << type_name(b.labels[row]) << "[" << row << "]";
    return os.str();
}

Vector take(const Vector& v, const std::vector<Index>& idx) {
    Vector out(static_cast<Index>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) out(k) = v(idx[k]);
    return out;
}

Vector free_or_zero(const Vector& free_values, size_t n, const char* what) {
    if (free_values.size() == 0) return Vector::Zero(static_cast<Index>(n));
    if (free_values.size() != static_cast<Index>(n)) {
        std::ostringstream os;
        os << what << ": expected " << n << " free values, got " << free_values.size();
        throw InputError(os.str());
    }
    return free_values;
}

}  // namespace

Matrix observable_block(const QuadraticMove& move, const ClassifiedBasis& basis_from,
                        const ClassifiedBasis& basis_to) {
    return basis_from.rows(basis_from.pre_observable_rows()) * move.c *
           basis_to.rows(basis_to.post_observable_rows()).transpose();
}

SolveResult forward_solve(const QuadraticMove& move, const ClassifiedBasis& basis_from,
                          const ClassifiedBasis& basis_to, const CanonicalData& data, const Vector& free_values,
                          const SolveOptions& opt) {
    check_move_bases(move, basis_from, basis_to);
    const Index q = move.dim();
    if (data.x.size() != q || data.p.size() != q) throw InputError("forward_solve: data dimension mismatch");
    if (data.side != MomentumSide::pre) throw InputError("forward_solve: needs pre-side momenta");
    if (data.step != move.step_from) throw InputError("forward_solve: data lives on the wrong step");
    SolveResult res;
    Vector shifted = data.p + move.a * data.x;
    double scale = 1.0 + inf_norm(data.p) + max_abs(move.a) * inf_norm(data.x) * static_cast<double>(q);
    for (Index i : basis_from.left_null_rows()) {
        double r = basis_from.T.row(i).dot(shifted);
        if (std::abs(r) > 100.0 * opt.tol * scale)
            report_violation(constraint_name("-C^", move.step_from, basis_from, i), r, opt, res.warnings);
    }
    auto A = basis_from.pre_observable_rows();
    auto B = basis_to.post_observable_rows();
    auto R = basis_to.right_null_rows();
    Matrix cab_inv = invert_block(observable_block(move, basis_from, basis_to), "c_AB", move.step_from);
    Vector pi_a = basis_from.rows(A) * shifted;
    Vector X = Vector::Zero(q);
    Vector xb = -cab_inv * pi_a;
    for (size_t k = 0; k < B.size(); ++k) X(B[k]) = xb(k);
    Vector f = free_or_zero(free_values, R.size(), "forward_solve");
    for (size_t k = 0; k < R.size(); ++k) X(R[k]) = f(k);
    res.data.step = move.step_to;
    res.data.side = MomentumSide::post;
    res.data.x = basis_to.T.transpose() * X;
    res.data.p = move.b * res.data.x + move.c.transpose() * data.x;
    res.free_rows = R;
    return res;
}

SolveResult backward_solve(const QuadraticMove& move, const ClassifiedBasis& basis_from,
                           const ClassifiedBasis& basis_to, const CanonicalData& data, const Vector& free_values,
                           const SolveOptions& opt) {
    check_move_bases(move, basis_from, basis_to);
    const Index q = move.dim();
    if (data.x.size() != q || data.p.size() != q) throw InputError("backward_solve: data dimension mismatch");
    if (data.side != MomentumSide::post) throw InputError("backward_solve: needs post-side momenta");
    if (data.step != move.step_to) throw InputError("backward_solve: data lives on the wrong step");
    SolveResult res;
    Vector shifted = data.p - move.b * data.x;
    double scale = 1.0 + inf_norm(data.p) + max_abs(move.b) * inf_norm(data.x) * static_cast<double>(q);
    for (Index i : basis_to.right_null_rows()) {
        double r = basis_to.T.row(i).dot(shifted);
        if (std::abs(r) > 100.0 * opt.tol * scale)
            report_violation(constraint_name("+C^", move.step_to, basis_to, i), r, opt, res.warnings);
    }
    auto A = basis_from.pre_observable_rows();
    auto B = basis_to.post_observable_rows();
    auto L = basis_from.left_null_rows();
    Matrix cab_inv = invert_block(observable_block(move, basis_from, basis_to), "c_AB", move.step_from);
    Vector pi_b = basis_to.rows(B) * shifted;
    Vector X = Vector::Zero(q);
    Vector xa = cab_inv.transpose() * pi_b;
    for (size_t k = 0; k < A.size(); ++k) X(A[k]) = xa(k);
    Vector f = free_or_zero(free_values, L.size(), "backward_solve");
    for (size_t k = 0; k < L.size(); ++k) X(L[k]) = f(k);
    res.data.step = move.step_from;
    res.data.side = MomentumSide::pre;
    res.data.x = basis_from.T.transpose() * X;
    res.data.p = -move.a * res.data.x - move.c * data.x;
    res.free_rows = L;
    return res;
}

Matrix observable_map(const QuadraticMove& move, const ClassifiedBasis& basis_from, const ClassifiedBasis& basis_to) {
    Matrix cab = observable_block(move, basis_from, basis_to);
    Matrix inv = invert_block(cab, "c_AB", move.step_from);
    const Index n = cab.rows();
    Matrix j = Matrix::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = -inv;
    j.bottomLeftCorner(n, n) = cab.transpose();
    return j;
}

BoundaryResult boundary_solve(const QuadraticMove& move1, const QuadraticMove& move2,
                              const ClassifiedBasis& basis_mid, const Vector& x_initial, const Vector& x_final,
                              const Vector& multipliers, double tol) {
    const Index q = basis_mid.dim();
    if (move1.step_to != basis_mid.step || move2.step_from != basis_mid.step)
        throw InputError("boundary_solve: basis does not sit between the moves");
    if (x_initial.size() != q || x_final.size() != q) throw InputError("boundary_solve: data dimension mismatch");
    Matrix h = move1.b + move2.a;
    Vector J = move1.c.transpose() * x_initial + move2.c * x_final;
    double scale = 1.0 + (max_abs(move1.c) * inf_norm(x_initial) + max_abs(move2.c) * inf_norm(x_final)) *
                             static_cast<double>(q);
    auto nu = basis_mid.rows_where(in_hessian_null);
    for (Index i : nu) {
        VectorType t = basis_mid.labels[i];
        if (t == VectorType::I) continue;
        double r = basis_mid.T.row(i).dot(J);
        if (std::abs(r) > 100.0 * tol * scale) {
            std::ostringstream os;
            if (t == VectorType::l) os << "H^" << basis_mid.step - 1;
            else if (t == VectorType::r) os << "H^" << basis_mid.step + 1;
            else os << "B^" << basis_mid.step - 1 << basis_mid.step + 1;
            os << "_" << type_name(t) << "[" << i << "] violated by the boundary data (residual " << r << ")";
            throw InconsistentBoundaryError(os.str());
        }
    }
    auto alpha = basis_mid.rows_where([](VectorType t) { return !in_hessian_null(t); });
    Matrix ta = basis_mid.rows(alpha);
    Vector X = Vector::Zero(q);
    if (!alpha.empty()) {
        Matrix haa = ta * h * ta.transpose();
        Eigen::JacobiSVD<Matrix> svd(haa);
        const Vector& s = svd.singularValues();
        if (!(s(s.size() - 1) > tol * std::max(max_abs(h), 1e-300) * static_cast<double>(q)))
            throw DegeneracyError("boundary_solve: h restricted to the alpha rows is singular");
        Vector xa = -haa.fullPivLu().solve(ta * J);
        for (size_t k = 0; k < alpha.size(); ++k) X(alpha[k]) = xa(k);
    }
    Vector m = free_or_zero(multipliers, nu.size(), "boundary_solve");
    for (size_t k = 0; k < nu.size(); ++k) X(nu[k]) = m(k);
    return {basis_mid.T.transpose() * X, nu};
}

DofReport dof_report(const QuadraticMove& move1, const QuadraticMove& move2, const ClassifiedBasis& basis0,
                     const ClassifiedBasis& basis1, const ClassifiedBasis& basis2, const BracketTable& table1) {
    if (move1.step_to != basis1.step || move2.step_from != basis1.step || basis0.step != move1.step_from ||
        basis2.step != move2.step_to)
        throw InputError("dof_report: bases do not match the chain");
    DofReport rep;
    rep.counts = {{basis0.step, basis0.counts}, {basis1.step, basis1.counts}, {basis2.step, basis2.counts}};
    auto label = [](int a, int b) {
        std::ostringstream os;
        os << a << "->" << b;
        return os.str();
    };
    rep.move_pairs.push_back({label(move1.step_from, move1.step_to),
                              2 * static_cast<int>(basis0.pre_observable_rows().size())});
    rep.move_pairs.push_back({label(move2.step_from, move2.step_to),
                              2 * static_cast<int>(basis1.pre_observable_rows().size())});
    rep.m_lambda_rho = table1.m_lambda_rho;
    const auto& c = basis1.counts;
    rep.through = 2 * c[VectorType::gamma] + 2 * c[VectorType::z] + 2 * rep.m_lambda_rho;
    rep.through_from_constraints = 2 * static_cast<int>(basis1.dim()) - 2 * table1.n_first - table1.n_second;
    if (rep.through != rep.through_from_constraints) {
        std::ostringstream os;
        os << "dof_report: counting formulas disagree (" << rep.through << " vs " << rep.through_from_constraints
           << ")";
        throw InternalError(os.str());
    }
    for (Index i = 0; i < basis1.dim(); ++i) {
        VectorType t = basis1.labels[i];
        rep.roles.push_back({i, t, !in_left_null(t), !in_right_null(t), in_right_null(t), in_left_null(t),
                             t == VectorType::I});
    }
    return rep;
}

FixedVariables fixed_variable_solve(const ClassifiedBasis& basis, const Matrix& h, const Vector& x_split,
                                    const Vector& post_pi, double tol) {
    const Index q = basis.dim();
    if (x_split.size() != q || post_pi.size() != q) throw InputError("fixed_variable_solve: dimension mismatch");
    FixedVariables out;
    out.x_split = x_split;
    auto H = basis.rows_of({VectorType::H});
    auto lam = basis.rows_of({VectorType::lambda});
    auto rho = basis.rows_of({VectorType::rho});
    auto gam = basis.rows_of({VectorType::gamma});
    auto at = basis.rows_of({VectorType::lambda, VectorType::rho, VectorType::gamma});
    out.h_rows = H;
    if (H.empty() && lam.empty()) {
        out.pre_pi_rho_tilde = Vector::Zero(static_cast<Index>(rho.size()));
        out.pre_pi_gamma_tilde = take(post_pi, gam);
        return out;
    }
    double scale = std::max(max_abs(h), 1e-300) * static_cast<double>(q);
    // effective Hessian on solutions of the H equations
    auto block = [&](const std::vector<Index>& r, const std::vector<Index>& c) { return hessian_block(basis, h, r, c); };
    Matrix hh_inv = Matrix::Zero(0, 0);
    if (!H.empty()) {
        Matrix hh = block(H, H);
        Eigen::JacobiSVD<Matrix> svd(hh);
        const Vector& s = svd.singularValues();
        if (!(s(s.size() - 1) > tol * scale))
            throw DegeneracyError(
                "fixed_variable_solve: h_HH is singular (a pair of H pre/post-constraints commutes)");
        hh_inv = hh.fullPivLu().inverse();
    }
    auto htilde = [&](const std::vector<Index>& r, const std::vector<Index>& c) {
        Matrix m = block(r, c);
        if (!H.empty()) m -= block(r, H) * hh_inv * block(H, c);
        return m;
    };
    Vector x_lam = take(out.x_split, lam), x_gam = take(out.x_split, gam);
    if (!lam.empty() && !rho.empty()) {
        Matrix hlr = htilde(lam, rho);
        Eigen::ColPivHouseholderQR<Matrix> qr(hlr);
        qr.setThreshold(tol * static_cast<double>(q) * std::max(max_abs(h), 1e-300) / std::max(max_abs(hlr), 1e-300));
        int m = static_cast<int>(qr.rank());
        out.m_lambda_rho = m;
        std::vector<Index> fixed, other;
        for (Index k = 0; k < static_cast<Index>(rho.size()); ++k) {
            Index col = qr.colsPermutation().indices()(k);
            (k < m ? fixed : other).push_back(col);
        }
        std::sort(fixed.begin(), fixed.end());
        std::sort(other.begin(), other.end());
        auto sel = [&](const std::vector<Index>& cols) {
            std::vector<Index> out_rows;
            for (Index c : cols) out_rows.push_back(rho[c]);
            return out_rows;
        };
        auto rho_fixed = sel(fixed), rho_other = sel(other);
        Vector rhs = -take(post_pi, lam) - htilde(lam, lam) * x_lam - htilde(lam, gam) * x_gam;
        if (!rho_other.empty()) rhs -= htilde(lam, rho_other) * take(out.x_split, rho_other);
        if (m > 0) {
            Vector xf = htilde(lam, rho_fixed).colPivHouseholderQr().solve(rhs);
            for (size_t k = 0; k < rho_fixed.size(); ++k) out.x_split(rho_fixed[k]) = xf(k);
        }
        out.fixed_rho_rows = rho_fixed;
    }
    if (!H.empty()) {
        Vector xh = -hh_inv * block(H, at) * take(out.x_split, at);
        for (size_t k = 0; k < H.size(); ++k) out.x_split(H[k]) = xh(k);
    }
    x_lam = take(out.x_split, lam);
    out.pre_pi_rho_tilde = rho.empty() ? Vector(Vector::Zero(0)) : Vector(htilde(rho, lam) * x_lam);
    out.pre_pi_gamma_tilde = take(post_pi, gam);
    if (!gam.empty() && !lam.empty()) out.pre_pi_gamma_tilde += htilde(gam, lam) * x_lam;
    return out;
}

}  // namespace canonkit
