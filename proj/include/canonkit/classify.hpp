#pragma once

#include <array>
#include <initializer_list>
#include <string>
#include <vector>

#include "canonkit/action.hpp"
#include "canonkit/linalg.hpp"

namespace canonkit {

enum class VectorType { I, H, l, lambda, r, rho, z, gamma };

constexpr std::array<VectorType, 8> kAllTypes = {VectorType::I,   VectorType::H,      VectorType::l,
                                                 VectorType::lambda, VectorType::r, VectorType::rho,
                                                 VectorType::z,   VectorType::gamma};

const char* type_name(VectorType t);
VectorType parse_type(const std::string& s);

// Membership of a type in the left null space of c_next, the right null space of
// c_prev and the null space of h.
bool in_left_null(VectorType t);
bool in_right_null(VectorType t);
bool in_hessian_null(VectorType t);

struct TypeCounts {
    std::array<int, 8> n{};
    int& operator[](VectorType t) { return n[static_cast<size_t>(t)]; }
    int operator[](VectorType t) const { return n[static_cast<size_t>(t)]; }
    int total() const;
    bool operator==(const TypeCounts&) const = default;
};

struct ClassifiedBasis {
    int step = 0;
    Matrix T;
    std::vector<VectorType> labels;
    TypeCounts counts;

    Index dim() const { return T.rows(); }
    std::vector<Index> rows_of(std::initializer_list<VectorType> types) const;
    std::vector<Index> rows_where(bool (*pred)(VectorType)) const;
    Matrix rows(const std::vector<Index>& idx) const;
    // rows outside the left null space of c_next (propagating under the next move)
    std::vector<Index> pre_observable_rows() const;
    // rows outside the right null space of c_prev (propagated by the previous move)
    std::vector<Index> post_observable_rows() const;
    std::vector<Index> left_null_rows() const;
    std::vector<Index> right_null_rows() const;
};

struct StepMatrices {
    Matrix c_prev;  // empty when the step starts the sequence
    Matrix c_next;  // empty when the step ends the sequence
    Matrix h;
};

StepMatrices step_matrices(const MoveSequence& seq, int step);

ClassifiedBasis classify_step(int step, const Matrix& c_prev, const Matrix& c_next, const Matrix& h,
                              double tol = kDefaultTol);
ClassifiedBasis classify_step(const MoveSequence& seq, int step, double tol = kDefaultTol);

// Labels user supplied rows of T by membership tests; rejects rows that do not
// split the null spaces consistently.
ClassifiedBasis basis_from_rows(int step, const Matrix& T, const Matrix& c_prev, const Matrix& c_next,
                                const Matrix& h, double tol = kDefaultTol);

struct VariableSplit {
    ClassifiedBasis basis;
    Matrix x_map;       // (T^-1)^T
    Matrix pre_shift;   // T a_next
    Matrix post_shift;  // T b_prev

    Vector split_x(const Vector& x) const { return x_map * x; }
    Vector pre_pi(const Vector& x, const Vector& pre_p) const { return basis.T * pre_p + pre_shift * x; }
    Vector post_pi(const Vector& x, const Vector& post_p) const {
        return basis.T * post_p - post_shift * x;
    }
    // Jacobian of (x, p) -> (X, pi) for the pre or post side.
    Matrix jacobian(bool pre_side) const;
};

VariableSplit split_variables(const ClassifiedBasis& basis, const Matrix& a_next, const Matrix& b_prev);

Matrix hessian_block(const ClassifiedBasis& basis, const Matrix& h, std::initializer_list<VectorType> row_types,
                     std::initializer_list<VectorType> col_types);
Matrix hessian_block(const ClassifiedBasis& basis, const Matrix& h, const std::vector<Index>& rows,
                     const std::vector<Index>& cols);

}  // namespace canonkit
