#include "canonkit/effective.hpp"

#include <sstream>

#include "canonkit/errors.hpp"

namespace canonkit {

namespace {

std::string span_label(int from, int mid, int to) {
    std::ostringstream os;
    os << from << "->" << mid << "->" << to;
    return os.str();
}

Vector outer_coeffs(const Multiplier& m, int step) {
    const auto& c = m.induced;
    if (c.kind == ConstraintKind::boundary_data) {
        if (c.step == step) return c.x_coeffs;
        if (c.step_other == step) return c.x_coeffs_other;
        return Vector();
    }
    return c.step == step ? c.x_coeffs : Vector();
}

}  // namespace

EffectiveMove as_effective(const QuadraticMove& move) {
    EffectiveMove e;
    e.base = move;
    e.first_move = move;
    e.last_move = move;
    std::ostringstream os;
    os << move.step_from << "->" << move.step_to;
    e.provenance = os.str();
    return e;
}

Matrix alpha_inverse(const Matrix& h, const ClassifiedBasis& basis_mid, double tol) {
    auto alpha = basis_mid.rows_where([](VectorType t) { return !in_hessian_null(t); });
    Subspace s = column_span(basis_mid.rows(alpha).transpose(), h.rows(), 1e-14);
    if (s.dim() != static_cast<Index>(alpha.size()))
        throw DegeneracyError("alpha rows of the middle basis are dependent");
    return restricted_inverse(h, s, tol);
}

ClassifiedBasis classify_between(const EffectiveMove& left, const EffectiveMove& right, double tol) {
    if (left.base.step_to != right.base.step_from) throw InputError("moves are not adjacent");
    return classify_step(left.base.step_to, left.base.c, right.base.c, left.base.b + right.base.a, tol);
}

EffectiveMove compose(const EffectiveMove& left, const EffectiveMove& right, const ClassifiedBasis& basis_mid,
                      double tol) {
    const auto& m1 = left.base;
    const auto& m2 = right.base;
    if (m1.step_to != m2.step_from) throw InputError("compose: moves are not adjacent");
    if (m1.dim() != m2.dim() || basis_mid.dim() != m1.dim()) throw InputError("compose: dimension mismatch");
    if (basis_mid.step != m1.step_to) throw InputError("compose: basis is not classified for the middle step");
    Matrix h = m1.b + m2.a;
    Matrix hp;
    try {
        hp = alpha_inverse(h, basis_mid, tol);
    } catch (const DegeneracyError& e) {
        std::ostringstream os;
        os << "compose at step " << basis_mid.step << ": " << e.what();
        throw DegeneracyError(os.str());
    }
    EffectiveMove out;
    out.base.step_from = m1.step_from;
    out.base.step_to = m2.step_to;
    Matrix at = m1.a - m1.c * hp * m1.c.transpose();
    Matrix bt = m2.b - m2.c.transpose() * hp * m2.c;
    out.base.a = 0.5 * (at + at.transpose());
    out.base.b = 0.5 * (bt + bt.transpose());
    out.base.c = -m1.c * hp * m2.c;
    out.first_move = left.first_move;
    out.last_move = right.last_move;
    out.provenance = left.provenance + right.provenance.substr(right.provenance.find("->"));
    out.multipliers = left.multipliers;
    out.multipliers.insert(out.multipliers.end(), right.multipliers.begin(), right.multipliers.end());
    std::string here = span_label(m1.step_from, basis_mid.step, m2.step_to);
    for (auto& c : secondary_constraints(&m1, &m2, basis_mid, tol)) {
        Multiplier m;
        m.type = c.source_type;
        m.step = basis_mid.step;
        m.row = basis_mid.T.row(c.source_row).transpose();
        c.provenance = here;
        m.induced = c;
        m.provenance = here;
        out.multipliers.push_back(m);
    }
    return out;
}

EffectiveMove compose(const QuadraticMove& move1, const QuadraticMove& move2, const ClassifiedBasis& basis_mid,
                      double tol) {
    return compose(as_effective(move1), as_effective(move2), basis_mid, tol);
}

Vector effective_pre_momentum(const EffectiveMove& eff, const Vector& x_from, const Vector& x_to,
                              const Vector& multipliers) {
    Vector p = -eff.base.a * x_from - eff.base.c * x_to;
    for (size_t k = 0; k < eff.multipliers.size(); ++k) {
        Vector v = outer_coeffs(eff.multipliers[k], eff.base.step_from);
        if (v.size() && multipliers.size()) p -= multipliers(k) * v;
    }
    return p;
}

Vector effective_post_momentum(const EffectiveMove& eff, const Vector& x_from, const Vector& x_to,
                               const Vector& multipliers) {
    Vector p = eff.base.b * x_to + eff.base.c.transpose() * x_from;
    for (size_t k = 0; k < eff.multipliers.size(); ++k) {
        Vector v = outer_coeffs(eff.multipliers[k], eff.base.step_to);
        if (v.size() && multipliers.size()) p += multipliers(k) * v;
    }
    return p;
}

std::vector<LinearConstraint> effective_constraints(const EffectiveMove& eff, const ClassifiedBasis& basis_from,
                                                    const ClassifiedBasis& basis_to, double tol) {
    (void)tol;
    const auto& b = eff.base;
    if (basis_from.step != b.step_from || basis_to.step != b.step_to)
        throw InputError("effective_constraints: bases do not match the effective move");
    const Index nm = static_cast<Index>(eff.multipliers.size());
    std::vector<LinearConstraint> out;
    for (Index i : basis_from.left_null_rows()) {
        Vector l = basis_from.T.row(i).transpose();
        LinearConstraint c;
        c.step = b.step_from;
        c.kind = ConstraintKind::pre;
        c.p_coeffs = l;
        c.x_coeffs = b.a * l;
        c.source_type = basis_from.labels[i];
        c.source_row = i;
        c.multiplier_coeffs = Vector::Zero(nm);
        for (Index k = 0; k < nm; ++k) {
            Vector v = outer_coeffs(eff.multipliers[k], b.step_from);
            if (v.size()) c.multiplier_coeffs(k) = l.dot(v);
        }
        c.provenance = eff.provenance;
        out.push_back(c);
    }
    for (Index i : basis_to.right_null_rows()) {
        Vector r = basis_to.T.row(i).transpose();
        LinearConstraint c;
        c.step = b.step_to;
        c.kind = ConstraintKind::post;
        c.p_coeffs = r;
        c.x_coeffs = -(b.b * r);
        c.source_type = basis_to.labels[i];
        c.source_row = i;
        c.multiplier_coeffs = Vector::Zero(nm);
        for (Index k = 0; k < nm; ++k) {
            Vector v = outer_coeffs(eff.multipliers[k], b.step_to);
            if (v.size()) c.multiplier_coeffs(k) = -r.dot(v);
        }
        c.provenance = eff.provenance;
        out.push_back(c);
    }
    for (const auto& m : eff.multipliers) out.push_back(m.induced);
    return out;
}

ReclassReport reclassify_onshell(const EffectiveMove& left, const EffectiveMove& right, double tol) {
    if (left.base.step_to != right.base.step_from) throw InputError("reclassify_onshell: moves are not adjacent");
    const int s = left.base.step_to;
    ReclassReport rep;
    rep.before = classify_step(s, left.last_move.c, right.first_move.c, left.last_move.b + right.first_move.a, tol);
    rep.h_effective = left.base.b + right.base.a;
    rep.after = classify_step(s, left.base.c, right.base.c, rep.h_effective, tol);
    double scale = std::max({1.0, max_abs(rep.h_effective), max_abs(left.base.c), max_abs(right.base.c)});
    for (Index i : rep.before.rows_of({VectorType::I})) {
        Vector y = rep.before.T.row(i).transpose();
        double r = std::max({(rep.h_effective * y).cwiseAbs().maxCoeff(), (left.base.c * y).cwiseAbs().maxCoeff(),
                             (right.base.c.transpose() * y).cwiseAbs().maxCoeff()});
        if (r > 1e3 * tol * scale * static_cast<double>(y.size())) {
            rep.identity_rows_preserved = false;
            std::ostringstream os;
            os << "row " << i << " of type I is no longer a two-sided Hessian null vector (residual " << r << ")";
            rep.notes.push_back(os.str());
        }
    }
    for (auto t : kAllTypes) {
        int a = rep.before.counts[t], b = rep.after.counts[t];
        if (a != b) {
            std::ostringstream os;
            os << "N_" << type_name(t) << ": " << a << " -> " << b;
            rep.notes.push_back(os.str());
        }
    }
    return rep;
}

EffectiveMove chain_compose(const MoveSequence& seq, int from, int to, double tol) {
    if (from >= to) throw InputError("chain_compose: need from < to");
    const auto* first = seq.move_out_of(from);
    if (!first) throw InputError("chain_compose: no move starts at the first step");
    EffectiveMove eff = as_effective(*first);
    for (int s = from + 1; s < to; ++s) {
        const auto* next = seq.move_out_of(s);
        if (!next) throw InputError("chain_compose: sequence ends before the last step");
        EffectiveMove right = as_effective(*next);
        eff = compose(eff, right, classify_between(eff, right, tol), tol);
    }
    if (eff.base.step_to != to) throw InputError("chain_compose: sequence ends before the last step");
    return eff;
}

EffectiveMove chain_compose_right(const MoveSequence& seq, int from, int to, double tol) {
    if (from >= to) throw InputError("chain_compose: need from < to");
    const auto* last = seq.move_into(to);
    if (!last) throw InputError("chain_compose: no move ends at the last step");
    EffectiveMove eff = as_effective(*last);
    for (int s = to - 1; s > from; --s) {
        const auto* prev = seq.move_into(s);
        if (!prev) throw InputError("chain_compose: sequence starts after the first step");
        EffectiveMove left = as_effective(*prev);
        eff = compose(left, eff, classify_between(left, eff, tol), tol);
    }
    if (eff.base.step_from != from) throw InputError("chain_compose: sequence starts after the first step");
    return eff;
}

MonotonicityReport count_monotonicity(const QuadraticMove& move1, const QuadraticMove& move2,
                                      const EffectiveMove& eff, double tol) {
    const int q = static_cast<int>(move1.dim());
    MonotonicityReport r;
    r.d_first = q - static_cast<int>(numeric_rank(move1.c, tol));
    r.d_second = q - static_cast<int>(numeric_rank(move2.c, tol));
    r.d_hessian = q - static_cast<int>(numeric_rank(move1.b + move2.a, tol));
    // rank of c~ judged against the scale of the original couplings
    Eigen::JacobiSVD<Matrix> svd(eff.base.c);
    double scale = std::max({max_abs(move1.c) * max_abs(move2.c), max_abs(eff.base.c), 1e-300});
    int rank = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol * scale * q) ++rank;
    r.d_effective = q - rank;
    r.holds = r.d_effective >= std::max({r.d_first, r.d_second, r.d_hessian});
    return r;
}

bool count_monotonicity_check(const QuadraticMove& move1, const QuadraticMove& move2, const EffectiveMove& eff,
                              double tol) {
    auto r = count_monotonicity(move1, move2, eff, tol);
    if (!r.holds) {
        std::ostringstream os;
        os << "count monotonicity violated: D_eff = " << r.d_effective << " < max(" << r.d_first << ", "
           << r.d_second << ", " << r.d_hessian << ")";
        throw InternalError(os.str());
    }
    return true;
}

}  // namespace canonkit
