#pragma once

#include <string>
#include <vector>

#include "canonkit/action.hpp"
#include "canonkit/classify.hpp"
#include "canonkit/constraints.hpp"

namespace canonkit {

enum class MomentumSide { pre, post };

struct CanonicalData {
    int step = 0;
    Vector x;
    Vector p;
    MomentumSide side = MomentumSide::pre;
};

struct SolveOptions {
    double tol = kDefaultTol;
    bool strict = true;  // pre/post-constraint violations raise instead of warn
};

struct SolveResult {
    CanonicalData data;
    std::vector<Index> free_rows;  // basis rows of the output step set from free values
    std::vector<std::string> warnings;
};

// Square observable block c_AB = T_from[A] c T_to[B]^T.
Matrix observable_block(const QuadraticMove& move, const ClassifiedBasis& basis_from,
                        const ClassifiedBasis& basis_to);

SolveResult forward_solve(const QuadraticMove& move, const ClassifiedBasis& basis_from,
                          const ClassifiedBasis& basis_to, const CanonicalData& data, const Vector& free_values,
                          const SolveOptions& opt = {});
SolveResult backward_solve(const QuadraticMove& move, const ClassifiedBasis& basis_from,
                           const ClassifiedBasis& basis_to, const CanonicalData& data, const Vector& free_values,
                           const SolveOptions& opt = {});

// Linear map (x^A, -pi_A) -> (x^B, +pi_B) of a move on its observable pairs.
Matrix observable_map(const QuadraticMove& move, const ClassifiedBasis& basis_from, const ClassifiedBasis& basis_to);

struct BoundaryResult {
    Vector x;
    std::vector<Index> multiplier_rows;
};

// multipliers are ordered like the basis rows labeled I, l, r, z.
BoundaryResult boundary_solve(const QuadraticMove& move1, const QuadraticMove& move2,
                              const ClassifiedBasis& basis_mid, const Vector& x_initial, const Vector& x_final,
                              const Vector& multipliers, double tol = kDefaultTol);

struct VariableRole {
    Index row = 0;
    VectorType type = VectorType::gamma;
    bool pre_observable = false;
    bool post_observable = false;
    bool a_priori_free = false;
    bool a_posteriori_free = false;
    bool gauge = false;
};

struct DofReport {
    std::vector<std::pair<int, TypeCounts>> counts;
    std::vector<std::pair<std::string, int>> move_pairs;  // N_{n->n+1}
    int through = 0;                                      // 2N_gamma + 2N_z + 2m
    int through_from_constraints = 0;                     // 2Q - 2 #first - #second
    int m_lambda_rho = 0;
    std::vector<VariableRole> roles;  // middle step
};

DofReport dof_report(const QuadraticMove& move1, const QuadraticMove& move2, const ClassifiedBasis& basis0,
                     const ClassifiedBasis& basis1, const ClassifiedBasis& basis2, const BracketTable& table1);

struct FixedVariables {
    Vector x_split;                      // completed split coordinates at the step
    std::vector<Index> fixed_rho_rows;   // rho rows determined by the lambda equations
    std::vector<Index> h_rows;
    int m_lambda_rho = 0;
    Vector pre_pi_rho_tilde;             // transferred momenta on rho rows
    Vector pre_pi_gamma_tilde;           // transferred momenta on gamma rows
};

// x_split: split coordinates X at the step (H and fixed rho entries are overwritten);
// post_pi: +pi in split coordinates.
FixedVariables fixed_variable_solve(const ClassifiedBasis& basis, const Matrix& h, const Vector& x_split,
                                    const Vector& post_pi, double tol = kDefaultTol);

}  // namespace canonkit
