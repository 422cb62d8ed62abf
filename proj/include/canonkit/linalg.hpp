#pragma once

#include <Eigen/Dense>
#include <vector>

namespace canonkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

constexpr double kDefaultTol = 1e-10;

// Orthonormal column basis of a subspace of R^ambient_dim.
struct Subspace {
    Index ambient_dim = 0;
    Matrix basis;

    Subspace() = default;
    Subspace(Index ambient, Matrix b) : ambient_dim(ambient), basis(std::move(b)) {}

    Index dim() const { return basis.cols(); }
    bool empty() const { return basis.cols() == 0; }

    static Subspace zero(Index ambient) { return {ambient, Matrix(ambient, 0)}; }
    static Subspace full(Index ambient) { return {ambient, Matrix::Identity(ambient, ambient)}; }
};

void require_finite(const Matrix& m, const char* what);

Index numeric_rank(const Matrix& m, double tol = kDefaultTol);
Subspace right_null_basis(const Matrix& m, double tol = kDefaultTol);
Subspace left_null_basis(const Matrix& m, double tol = kDefaultTol);
Subspace intersect(const Subspace& s1, const Subspace& s2, double tol = kDefaultTol);
Matrix restricted_inverse(const Matrix& h, const Subspace& s, double tol = kDefaultTol);

// Helpers built on the kernels above.
Subspace column_span(const Matrix& cols, Index ambient, double tol = kDefaultTol);
Subspace sum(const Subspace& s1, const Subspace& s2, double tol = kDefaultTol);
Subspace complement_within(const Subspace& outer, const Subspace& inner, double tol = kDefaultTol);
Subspace orthogonal_complement(const Subspace& s, double tol = kDefaultTol);
bool contains(const Subspace& s, const Vector& v, double tol = kDefaultTol);
double span_distance(const Subspace& s1, const Subspace& s2);
Matrix projector(const Subspace& s);

// Determinant helpers on square blocks; an empty block has determinant 1.
double log_abs_det(const Matrix& m);
int signature(const Matrix& sym, double tol = kDefaultTol);

// Max-abs entry, 0 for empty matrices.
double max_abs(const Matrix& m);

// J^T Omega J - Omega for a linear map on (x, p) ordered phase space.
double symplectic_residual(const Matrix& j);

}  // namespace canonkit
