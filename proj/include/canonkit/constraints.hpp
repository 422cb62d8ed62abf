#pragma once

#include <string>
#include <vector>

#include "canonkit/action.hpp"
#include "canonkit/classify.hpp"

namespace canonkit {

enum class ConstraintKind { pre, post, holonomic_left, holonomic_right, boundary_data };
enum class ConstraintClass { first, second, unresolved };

const char* kind_name(ConstraintKind k);
const char* class_name(ConstraintClass c);
ConstraintKind parse_kind(const std::string& s);

// C = p_coeffs . p + x_coeffs . x (+ x_coeffs_other . x_other) (+ multiplier_coeffs . multipliers)
struct LinearConstraint {
    int step = 0;
    int step_other = 0;  // far step of a boundary-data constraint
    ConstraintKind kind = ConstraintKind::pre;
    Vector p_coeffs;
    Vector x_coeffs;
    Vector x_coeffs_other;
    VectorType source_type = VectorType::gamma;
    Index source_row = -1;
    ConstraintClass cls = ConstraintClass::unresolved;
    bool trivial = false;
    Vector multiplier_coeffs;
    std::string provenance;

    std::string label() const;
};

struct BracketTable {
    std::vector<LinearConstraint> constraints;
    Matrix brackets;
    std::vector<ConstraintClass> class_split;
    int m_lambda_rho = 0;
    int independent = 0;
    int n_first = 0;
    int n_second = 0;
};

// Either move may be null at the ends of a sequence.
std::vector<LinearConstraint> primary_constraints(const QuadraticMove* move_prev, const QuadraticMove* move_next,
                                                  const ClassifiedBasis& basis);

double poisson_bracket(const LinearConstraint& c1, const LinearConstraint& c2);

BracketTable bracket_table(const std::vector<LinearConstraint>& constraints, const Matrix& h,
                           const ClassifiedBasis& basis, double tol = kDefaultTol);

// rank of the (H, lambda) x (H, rho) bracket block minus N_H
int m_lambda_rho(const ClassifiedBasis& basis, const Matrix& h, double tol = kDefaultTol);

std::vector<LinearConstraint> secondary_constraints(const QuadraticMove* move_prev, const QuadraticMove* move_next,
                                                    const ClassifiedBasis& basis, double tol = kDefaultTol);

// Number of independent constraints among those with momentum parts on the given side.
int independent_count(const std::vector<LinearConstraint>& constraints, double tol = kDefaultTol);

}  // namespace canonkit
