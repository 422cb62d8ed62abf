#include "canonkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "canonkit/errors.hpp"

namespace canonkit {

namespace {

void fix_sign(Eigen::Ref<Vector> v) {
    if (v.size() == 0) return;
    double best = v.cwiseAbs().maxCoeff();
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= best * (1.0 - 1e-9)) {
            if (v(i) < 0) v = -v;
            return;
        }
    }
}

// Null vectors of m ordered by ascending singular value, ties by column index.
// Singular values at or below thr are treated as zero.
Subspace null_with_threshold(const Matrix& m, double thr) {
    const Index n = m.cols();
    if (n == 0) return Subspace::zero(0);
    if (m.rows() == 0) return Subspace::full(n);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    std::vector<std::pair<double, Index>> picks;
    for (Index j = 0; j < n; ++j) {
        double sj = j < s.size() ? s(j) : 0.0;
        if (sj <= thr) picks.emplace_back(sj, j);
    }
    std::stable_sort(picks.begin(), picks.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    Matrix b(n, static_cast<Index>(picks.size()));
    for (Index k = 0; k < b.cols(); ++k) {
        b.col(k) = svd.matrixV().col(picks[k].second);
        fix_sign(b.col(k));
    }
    return {n, b};
}

double relative_threshold(const Vector& s, Index rows, Index cols, double tol) {
    if (s.size() == 0) return 0.0;
    return tol * s(0) * static_cast<double>(std::max(rows, cols));
}

// Threshold for matrices built from orthonormal bases (unit scale); a principal
// angle below sqrt(tol) counts as coincidence.
double unit_threshold(Index rows, Index cols, double tol) {
    return std::sqrt(tol) * static_cast<double>(std::max<Index>(std::max(rows, cols), 1));
}

}  // namespace

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) throw InputError(std::string(what) + ": non-finite entries");
}

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Index numeric_rank(const Matrix& m, double tol) {
    require_finite(m, "numeric_rank");
    if (tol <= 0) throw InputError("numeric_rank: tolerance must be positive");
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const Vector& s = svd.singularValues();
    if (s(0) == 0.0) return 0;
    double thr = relative_threshold(s, m.rows(), m.cols(), tol);
    Index r = 0;
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > thr) ++r;
    return r;
}

Subspace right_null_basis(const Matrix& m, double tol) {
    require_finite(m, "right_null_basis");
    if (tol <= 0) throw InputError("right_null_basis: tolerance must be positive");
    if (m.size() == 0) return m.cols() == 0 ? Subspace::zero(0) : Subspace::full(m.cols());
    Eigen::JacobiSVD<Matrix> svd(m);
    double thr = relative_threshold(svd.singularValues(), m.rows(), m.cols(), tol);
    return null_with_threshold(m, thr);
}

Subspace left_null_basis(const Matrix& m, double tol) {
    return right_null_basis(m.transpose(), tol);
}

Subspace intersect(const Subspace& s1, const Subspace& s2, double tol) {
    if (s1.ambient_dim != s2.ambient_dim) throw InputError("intersect: ambient dimension mismatch");
    const Index n = s1.ambient_dim;
    if (s1.empty() || s2.empty()) return Subspace::zero(n);
    Matrix stacked(2 * n, n);
    stacked.topRows(n) = Matrix::Identity(n, n) - s1.basis * s1.basis.transpose();
    stacked.bottomRows(n) = Matrix::Identity(n, n) - s2.basis * s2.basis.transpose();
    Subspace out = null_with_threshold(stacked, unit_threshold(2 * n, n, tol));
    out.ambient_dim = n;
    return out;
}

Subspace column_span(const Matrix& cols, Index ambient, double tol) {
    if (cols.cols() == 0) return Subspace::zero(ambient);
    require_finite(cols, "column_span");
    Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeFullU);
    const Vector& s = svd.singularValues();
    double thr = relative_threshold(s, cols.rows(), cols.cols(), tol);
    Index r = 0;
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > thr && s(0) > 0) ++r;
    Matrix b = svd.matrixU().leftCols(r);
    for (Index k = 0; k < r; ++k) fix_sign(b.col(k));
    return {ambient, b};
}

Subspace sum(const Subspace& s1, const Subspace& s2, double tol) {
    if (s1.ambient_dim != s2.ambient_dim) throw InputError("sum: ambient dimension mismatch");
    Matrix cols(s1.ambient_dim, s1.dim() + s2.dim());
    cols << s1.basis, s2.basis;
    return column_span(cols, s1.ambient_dim, tol);
}

Subspace complement_within(const Subspace& outer, const Subspace& inner, double tol) {
    (void)tol;
    if (outer.ambient_dim != inner.ambient_dim)
        throw InputError("complement_within: ambient dimension mismatch");
    if (inner.empty() || outer.empty()) return outer;
    // inner is expected to lie in outer: its directions show up as unit cosines
    Matrix overlap = inner.basis.transpose() * outer.basis;
    Eigen::JacobiSVD<Matrix> svd(overlap, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    Index shared = 0;
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > 0.5) ++shared;
    Matrix b = outer.basis * svd.matrixV().rightCols(outer.dim() - shared);
    for (Index k = 0; k < b.cols(); ++k) fix_sign(b.col(k));
    return {outer.ambient_dim, b};
}

Subspace orthogonal_complement(const Subspace& s, double tol) {
    const Index n = s.ambient_dim;
    if (s.empty()) return Subspace::full(n);
    Subspace out = null_with_threshold(s.basis.transpose(), unit_threshold(s.dim(), n, tol));
    out.ambient_dim = n;
    return out;
}

bool contains(const Subspace& s, const Vector& v, double tol) {
    double nv = v.norm();
    if (nv == 0) return true;
    Vector r = s.empty() ? v : Vector(v - s.basis * (s.basis.transpose() * v));
    return r.norm() <= tol * 100.0 * nv;
}

Matrix projector(const Subspace& s) {
    if (s.empty()) return Matrix::Zero(s.ambient_dim, s.ambient_dim);
    return s.basis * s.basis.transpose();
}

double span_distance(const Subspace& s1, const Subspace& s2) {
    if (s1.ambient_dim != s2.ambient_dim || s1.dim() != s2.dim())
        return std::numeric_limits<double>::infinity();
    if (s1.empty()) return 0.0;
    return max_abs(projector(s1) - projector(s2));
}

Matrix restricted_inverse(const Matrix& h, const Subspace& s, double tol) {
    require_finite(h, "restricted_inverse");
    const Index q = h.rows();
    if (h.cols() != q) throw InputError("restricted_inverse: matrix must be square");
    if (s.ambient_dim != q) throw InputError("restricted_inverse: ambient dimension mismatch");
    if (s.empty()) return Matrix::Zero(q, q);
    Matrix block = s.basis.transpose() * h * s.basis;
    block = 0.5 * (block + block.transpose());
    Eigen::JacobiSVD<Matrix> hs(h);
    Eigen::JacobiSVD<Matrix> bs(block);
    double scale = hs.singularValues()(0);
    double smin = bs.singularValues()(bs.singularValues().size() - 1);
    if (scale == 0.0 || smin <= tol * scale * static_cast<double>(q))
        throw DegeneracyError("restricted_inverse: restricted block is singular");
    Matrix inv = block.fullPivLu().inverse();
    inv = 0.5 * (inv + inv.transpose());
    return s.basis * inv * s.basis.transpose();
}

double log_abs_det(const Matrix& m) {
    if (m.rows() != m.cols()) throw InputError("log_abs_det: matrix must be square");
    if (m.size() == 0) return 0.0;
    Eigen::FullPivLU<Matrix> lu(m);
    double acc = 0.0;
    for (Index i = 0; i < m.rows(); ++i) acc += std::log(std::abs(lu.matrixLU()(i, i)));
    return acc;
}

int signature(const Matrix& sym, double tol) {
    if (sym.size() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sym + sym.transpose()), Eigen::EigenvaluesOnly);
    const Vector& ev = es.eigenvalues();
    double thr = tol * ev.cwiseAbs().maxCoeff() * static_cast<double>(sym.rows());
    int sig = 0;
    for (Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > thr) ++sig;
        else if (ev(i) < -thr) --sig;
    }
    return sig;
}

double symplectic_residual(const Matrix& j) {
    const Index n2 = j.rows();
    if (j.cols() != n2 || n2 % 2 != 0) throw InputError("symplectic_residual: need a square even map");
    const Index n = n2 / 2;
    Matrix omega = Matrix::Zero(n2, n2);
    omega.topRightCorner(n, n) = Matrix::Identity(n, n);
    omega.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
    return max_abs(j.transpose() * omega * j - omega);
}

}  // namespace canonkit
