#include "canonkit/classify.hpp"

#include <sstream>

#include "canonkit/errors.hpp"

namespace canonkit {

const char* type_name(VectorType t) {
    switch (t) {
        case VectorType::I: return "I";
        case VectorType::H: return "H";
        case VectorType::l: return "l";
        case VectorType::lambda: return "lambda";
        case VectorType::r: return "r";
        case VectorType::rho: return "rho";
        case VectorType::z: return "z";
        case VectorType::gamma: return "gamma";
    }
    return "?";
}

VectorType parse_type(const std::string& s) {
    for (auto t : kAllTypes)
        if (s == type_name(t)) return t;
    throw InputError("unknown vector type '" + s + "'");
}

bool in_left_null(VectorType t) {
    return t == VectorType::I || t == VectorType::H || t == VectorType::l || t == VectorType::lambda;
}

bool in_right_null(VectorType t) {
    return t == VectorType::I || t == VectorType::H || t == VectorType::r || t == VectorType::rho;
}

bool in_hessian_null(VectorType t) {
    return t == VectorType::I || t == VectorType::l || t == VectorType::r || t == VectorType::z;
}

int TypeCounts::total() const {
    int s = 0;
    for (int v : n) s += v;
    return s;
}

std::vector<Index> ClassifiedBasis::rows_of(std::initializer_list<VectorType> types) const {
    std::vector<Index> out;
    for (Index i = 0; i < static_cast<Index>(labels.size()); ++i)
        for (auto t : types)
            if (labels[i] == t) {
                out.push_back(i);
                break;
            }
    return out;
}

std::vector<Index> ClassifiedBasis::rows_where(bool (*pred)(VectorType)) const {
    std::vector<Index> out;
    for (Index i = 0; i < static_cast<Index>(labels.size()); ++i)
        if (pred(labels[i])) out.push_back(i);
    return out;
}

Matrix ClassifiedBasis::rows(const std::vector<Index>& idx) const {
    Matrix out(static_cast<Index>(idx.size()), T.cols());
    for (size_t k = 0; k < idx.size(); ++k) out.row(k) = T.row(idx[k]);
    return out;
}

std::vector<Index> ClassifiedBasis::pre_observable_rows() const {
    return rows_where([](VectorType t) { return !in_left_null(t); });
}

std::vector<Index> ClassifiedBasis::post_observable_rows() const {
    return rows_where([](VectorType t) { return !in_right_null(t); });
}

std::vector<Index> ClassifiedBasis::left_null_rows() const { return rows_where(in_left_null); }
std::vector<Index> ClassifiedBasis::right_null_rows() const { return rows_where(in_right_null); }

StepMatrices step_matrices(const MoveSequence& seq, int step) {
    StepMatrices out;
    const auto* prev = seq.move_into(step);
    const auto* next = seq.move_out_of(step);
    if (!prev && !next) {
        std::ostringstream os;
        os << "step " << step << " is not part of the sequence";
        throw InputError(os.str());
    }
    if (prev) out.c_prev = prev->c;
    if (next) out.c_next = next->c;
    out.h = seq.hessian(step);
    return out;
}

namespace {

struct NullSpaces {
    Subspace R, L, K;
};

NullSpaces null_spaces(const Matrix& c_prev, const Matrix& c_next, const Matrix& h, double tol) {
    const Index q = h.rows();
    if (h.cols() != q) throw InputError("classify: h must be square");
    if (c_prev.size() && (c_prev.rows() != q || c_prev.cols() != q))
        throw InputError("classify: c_prev must be Q x Q");
    if (c_next.size() && (c_next.rows() != q || c_next.cols() != q))
        throw InputError("classify: c_next must be Q x Q");
    require_finite(h, "h");
    NullSpaces ns;
    ns.R = c_prev.size() ? right_null_basis(c_prev, tol) : Subspace::full(q);
    ns.L = c_next.size() ? left_null_basis(c_next, tol) : Subspace::full(q);
    ns.K = right_null_basis(h, tol);
    return ns;
}

void append(Matrix& t, std::vector<VectorType>& labels, const Subspace& s, VectorType type) {
    Index r0 = t.rows();
    t.conservativeResize(r0 + s.dim(), s.ambient_dim);
    for (Index k = 0; k < s.dim(); ++k) {
        t.row(r0 + k) = s.basis.col(k).transpose();
        labels.push_back(type);
    }
}

void check_invertible(const ClassifiedBasis& b) {
    const Index q = b.T.cols();
    if (b.T.rows() != q) {
        std::ostringstream os;
        os << "step " << b.step << ": basis has " << b.T.rows() << " rows for Q = " << q;
        throw DegeneracyError(os.str());
    }
    if (q == 0) return;
    Eigen::JacobiSVD<Matrix> svd(b.T);
    double smin = svd.singularValues()(q - 1);
    if (!(smin > 1e-8 * svd.singularValues()(0))) {
        std::ostringstream os;
        os << "step " << b.step << ": failed to complete an invertible basis";
        throw DegeneracyError(os.str());
    }
}

}  // namespace

ClassifiedBasis classify_step(int step, const Matrix& c_prev, const Matrix& c_next, const Matrix& h,
                              double tol) {
    NullSpaces ns = null_spaces(c_prev, c_next, h, tol);
    const Index q = h.rows();
    Subspace Y = intersect(ns.R, ns.L, tol);
    Subspace YI = intersect(Y, ns.K, tol);
    Subspace YH = complement_within(Y, YI, tol);
    Subspace LK = intersect(ns.L, ns.K, tol);
    Subspace RK = intersect(ns.R, ns.K, tol);
    Subspace Ll = complement_within(LK, YI, tol);
    Subspace Rr = complement_within(RK, YI, tol);
    Subspace Llam = complement_within(ns.L, sum(Y, LK, tol), tol);
    Subspace Rrho = complement_within(ns.R, sum(Y, RK, tol), tol);
    Subspace U = sum(ns.L, ns.R, tol);
    Subspace KU = intersect(ns.K, U, tol);
    Subspace Z = complement_within(ns.K, KU, tol);
    Subspace V = orthogonal_complement(sum(U, ns.K, tol), tol);

    ClassifiedBasis b;
    b.step = step;
    b.T = Matrix(0, q);
    append(b.T, b.labels, YI, VectorType::I);
    append(b.T, b.labels, YH, VectorType::H);
    append(b.T, b.labels, Ll, VectorType::l);
    append(b.T, b.labels, Llam, VectorType::lambda);
    append(b.T, b.labels, Rr, VectorType::r);
    append(b.T, b.labels, Rrho, VectorType::rho);
    append(b.T, b.labels, Z, VectorType::z);
    append(b.T, b.labels, V, VectorType::gamma);
    for (auto t : b.labels) ++b.counts[t];
    check_invertible(b);
    return b;
}

ClassifiedBasis classify_step(const MoveSequence& seq, int step, double tol) {
    StepMatrices m = step_matrices(seq, step);
    return classify_step(step, m.c_prev, m.c_next, m.h, tol);
}

ClassifiedBasis basis_from_rows(int step, const Matrix& T, const Matrix& c_prev, const Matrix& c_next,
                                const Matrix& h, double tol) {
    NullSpaces ns = null_spaces(c_prev, c_next, h, tol);
    const Index q = h.rows();
    if (T.rows() != q || T.cols() != q) throw InputError("basis override must be Q x Q");
    require_finite(T, "basis override");
    ClassifiedBasis b;
    b.step = step;
    b.T = T;
    int nr = 0, nl = 0, nk = 0;
    for (Index i = 0; i < q; ++i) {
        Vector v = T.row(i).transpose();
        bool r = contains(ns.R, v, tol), l = contains(ns.L, v, tol), k = contains(ns.K, v, tol);
        nr += r;
        nl += l;
        nk += k;
        VectorType t;
        if (r && l) t = k ? VectorType::I : VectorType::H;
        else if (l) t = k ? VectorType::l : VectorType::lambda;
        else if (r) t = k ? VectorType::r : VectorType::rho;
        else t = k ? VectorType::z : VectorType::gamma;
        b.labels.push_back(t);
        ++b.counts[t];
    }
    check_invertible(b);
    if (nr != ns.R.dim() || nl != ns.L.dim() || nk != ns.K.dim()) {
        std::ostringstream os;
        os << "step " << step << ": basis override does not span the null spaces (right " << nr << "/"
           << ns.R.dim() << ", left " << nl << "/" << ns.L.dim() << ", hessian " << nk << "/" << ns.K.dim()
           << ")";
        throw InputError(os.str());
    }
    return b;
}

Matrix VariableSplit::jacobian(bool pre_side) const {
    const Index q = basis.T.rows();
    Matrix j = Matrix::Zero(2 * q, 2 * q);
    j.topLeftCorner(q, q) = x_map;
    j.bottomLeftCorner(q, q) = pre_side ? pre_shift : Matrix(-post_shift);
    j.bottomRightCorner(q, q) = basis.T;
    return j;
}

VariableSplit split_variables(const ClassifiedBasis& basis, const Matrix& a_next, const Matrix& b_prev) {
    const Index q = basis.T.rows();
    auto sized = [&](const Matrix& m) { return m.size() ? m : Matrix(Matrix::Zero(q, q)); };
    Matrix a = sized(a_next), b = sized(b_prev);
    if (a.rows() != q || a.cols() != q || b.rows() != q || b.cols() != q)
        throw InputError("split_variables: dimension mismatch");
    Eigen::FullPivLU<Matrix> lu(basis.T);
    if (!lu.isInvertible()) throw InternalError("split_variables: singular basis");
    VariableSplit s;
    s.basis = basis;
    s.x_map = lu.inverse().transpose();
    s.pre_shift = basis.T * a;
    s.post_shift = basis.T * b;
    return s;
}

Matrix hessian_block(const ClassifiedBasis& basis, const Matrix& h, const std::vector<Index>& rows,
                     const std::vector<Index>& cols) {
    return basis.rows(rows) * h * basis.rows(cols).transpose();
}

Matrix hessian_block(const ClassifiedBasis& basis, const Matrix& h, std::initializer_list<VectorType> row_types,
                     std::initializer_list<VectorType> col_types) {
    return hessian_block(basis, h, basis.rows_of(row_types), basis.rows_of(col_types));
}

}  // namespace canonkit
