#include "canonkit/constraints.hpp"

#include <sstream>

#include "canonkit/errors.hpp"

namespace canonkit {

const char* kind_name(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::pre: return "pre";
        case ConstraintKind::post: return "post";
        case ConstraintKind::holonomic_left: return "holonomic_left";
        case ConstraintKind::holonomic_right: return "holonomic_right";
        case ConstraintKind::boundary_data: return "boundary_data";
    }
    return "?";
}

const char* class_name(ConstraintClass c) {
    switch (c) {
        case ConstraintClass::first: return "first";
        case ConstraintClass::second: return "second";
        case ConstraintClass::unresolved: return "unresolved";
    }
    return "?";
}

ConstraintKind parse_kind(const std::string& s) {
    for (auto k : {ConstraintKind::pre, ConstraintKind::post, ConstraintKind::holonomic_left,
                   ConstraintKind::holonomic_right, ConstraintKind::boundary_data})
        if (s == kind_name(k)) return k;
    throw InputError("unknown constraint kind '" + s + "'");
}

std::string LinearConstraint::label() const {
    std::ostringstream os;
    switch (kind) {
        case ConstraintKind::pre: os << "-C^" << step; break;
        case ConstraintKind::post: os << "+C^" << step; break;
        case ConstraintKind::holonomic_left:
        case ConstraintKind::holonomic_right: os << "H^" << step; break;
        case ConstraintKind::boundary_data: os << "B^" << step << step_other; break;
    }
    os << "_" << type_name(source_type) << "[" << source_row << "]";
    return os.str();
}

std::vector<LinearConstraint> primary_constraints(const QuadraticMove* move_prev, const QuadraticMove* move_next,
                                                  const ClassifiedBasis& basis) {
    const Index q = basis.dim();
    std::vector<LinearConstraint> out;
    if (move_prev) {
        if (move_prev->b.rows() != q) throw InputError("primary_constraints: dimension mismatch");
        for (Index i : basis.right_null_rows()) {
            Vector r = basis.T.row(i).transpose();
            LinearConstraint c;
            c.step = basis.step;
            c.kind = ConstraintKind::post;
            c.p_coeffs = r;
            c.x_coeffs = -(move_prev->b * r);
            c.source_type = basis.labels[i];
            c.source_row = i;
            out.push_back(c);
        }
    }
    if (move_next) {
        if (move_next->a.rows() != q) throw InputError("primary_constraints: dimension mismatch");
        for (Index i : basis.left_null_rows()) {
            Vector l = basis.T.row(i).transpose();
            LinearConstraint c;
            c.step = basis.step;
            c.kind = ConstraintKind::pre;
            c.p_coeffs = l;
            c.x_coeffs = move_next->a * l;
            c.source_type = basis.labels[i];
            c.source_row = i;
            out.push_back(c);
        }
    }
    return out;
}

double poisson_bracket(const LinearConstraint& c1, const LinearConstraint& c2) {
    if (c1.step != c2.step) throw InputError("poisson_bracket: constraints live on different steps");
    if (c1.kind == ConstraintKind::boundary_data || c2.kind == ConstraintKind::boundary_data)
        throw InputError("poisson_bracket: boundary-data constraints span two steps");
    return c1.x_coeffs.dot(c2.p_coeffs) - c1.p_coeffs.dot(c2.x_coeffs);
}

int m_lambda_rho(const ClassifiedBasis& basis, const Matrix& h, double tol) {
    auto pre = basis.rows_of({VectorType::H, VectorType::lambda});
    auto post = basis.rows_of({VectorType::H, VectorType::rho});
    if (pre.empty() || post.empty()) return 0;
    Matrix p = hessian_block(basis, h, pre, post);
    // rank relative to the Hessian scale, not the block's own
    double scale = std::max(max_abs(h), 1e-300);
    Eigen::JacobiSVD<Matrix> svd(p);
    int rank = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol * scale * static_cast<double>(h.rows())) ++rank;
    return rank - basis.counts[VectorType::H];
}

int independent_count(const std::vector<LinearConstraint>& constraints, double tol) {
    if (constraints.empty()) return 0;
    const Index q = constraints.front().p_coeffs.size();
    Matrix m(static_cast<Index>(constraints.size()), 2 * q);
    for (size_t k = 0; k < constraints.size(); ++k) {
        m.row(k).head(q) = constraints[k].p_coeffs.transpose();
        m.row(k).tail(q) = constraints[k].x_coeffs.transpose();
    }
    return static_cast<int>(numeric_rank(m, tol));
}

BracketTable bracket_table(const std::vector<LinearConstraint>& constraints, const Matrix& h,
                           const ClassifiedBasis& basis, double tol) {
    BracketTable t;
    t.constraints = constraints;
    const Index n = static_cast<Index>(constraints.size());
    t.brackets = Matrix::Zero(n, n);
    double scale = 1.0;
    for (const auto& c : constraints)
        scale = std::max({scale, c.x_coeffs.size() ? c.x_coeffs.cwiseAbs().maxCoeff() : 0.0,
                          c.p_coeffs.size() ? c.p_coeffs.cwiseAbs().maxCoeff() : 0.0});
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            double v = poisson_bracket(constraints[i], constraints[j]);
            t.brackets(i, j) = v;
            t.brackets(j, i) = -v;
        }
    t.m_lambda_rho = h.size() ? m_lambda_rho(basis, h, tol) : 0;
    if (n == 0) return t;
    double thr = tol * scale * scale * static_cast<double>(std::max<Index>(n, basis.dim())) * 100.0;
    Eigen::JacobiSVD<Matrix> svd(t.brackets);
    int rank = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > thr) ++rank;
    t.independent = independent_count(constraints, tol);
    t.n_second = rank;
    t.n_first = t.independent - rank;
    int nonzero = 0;
    std::vector<bool> zero_row(n);
    for (Index i = 0; i < n; ++i) {
        zero_row[i] = t.brackets.row(i).cwiseAbs().maxCoeff() <= thr;
        if (!zero_row[i]) ++nonzero;
    }
    for (Index i = 0; i < n; ++i) {
        ConstraintClass c = zero_row[i] ? ConstraintClass::first
                                        : (nonzero == rank ? ConstraintClass::second : ConstraintClass::unresolved);
        t.class_split.push_back(c);
        t.constraints[i].cls = c;
    }
    return t;
}

std::vector<LinearConstraint> secondary_constraints(const QuadraticMove* move_prev, const QuadraticMove* move_next,
                                                    const ClassifiedBasis& basis, double tol) {
    const Index q = basis.dim();
    Matrix c_prev = move_prev ? move_prev->c : Matrix(Matrix::Zero(q, q));
    Matrix c_next = move_next ? move_next->c : Matrix(Matrix::Zero(q, q));
    int prev_step = basis.step - 1, next_step = basis.step + 1;
    double scale = std::max({1.0, max_abs(c_prev), max_abs(c_next)});
    auto is_trivial = [&](const LinearConstraint& c) {
        double m = c.x_coeffs.cwiseAbs().maxCoeff();
        if (c.x_coeffs_other.size()) m = std::max(m, c.x_coeffs_other.cwiseAbs().maxCoeff());
        return m <= tol * scale * static_cast<double>(q);
    };
    std::vector<LinearConstraint> out;
    for (Index i = 0; i < q; ++i) {
        VectorType t = basis.labels[i];
        if (t != VectorType::l && t != VectorType::r && t != VectorType::z) continue;
        Vector v = basis.T.row(i).transpose();
        LinearConstraint c;
        c.source_type = t;
        c.source_row = i;
        c.p_coeffs = Vector::Zero(q);
        if (t == VectorType::l) {
            c.kind = ConstraintKind::holonomic_left;
            c.step = prev_step;
            c.x_coeffs = c_prev * v;
        } else if (t == VectorType::r) {
            c.kind = ConstraintKind::holonomic_right;
            c.step = next_step;
            c.x_coeffs = c_next.transpose() * v;
        } else {
            c.kind = ConstraintKind::boundary_data;
            c.step = prev_step;
            c.step_other = next_step;
            c.x_coeffs = c_prev * v;
            c.x_coeffs_other = c_next.transpose() * v;
        }
        c.trivial = is_trivial(c);
        std::ostringstream os;
        os << "step " << basis.step;
        c.provenance = os.str();
        out.push_back(c);
    }
    return out;
}

}  // namespace canonkit
