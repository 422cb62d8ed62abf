#pragma once

#include <string>
#include <vector>

#include "canonkit/action.hpp"
#include "canonkit/classify.hpp"
#include "canonkit/constraints.hpp"

namespace canonkit {

struct Multiplier {
    VectorType type = VectorType::z;
    int step = 0;  // middle step the multiplier lives on
    Vector row;    // basis row (T)_nu at that step
    LinearConstraint induced;
    std::string provenance;
};

struct EffectiveMove {
    QuadraticMove base;
    std::vector<Multiplier> multipliers;
    std::string provenance;
    // outermost original moves, used when reclassifying the end steps
    QuadraticMove first_move;
    QuadraticMove last_move;
};

EffectiveMove as_effective(const QuadraticMove& move);

// The restricted inverse of h over the span of the alpha rows (H, lambda, rho, gamma).
Matrix alpha_inverse(const Matrix& h, const ClassifiedBasis& basis_mid, double tol = kDefaultTol);

EffectiveMove compose(const QuadraticMove& move1, const QuadraticMove& move2, const ClassifiedBasis& basis_mid,
                      double tol = kDefaultTol);
EffectiveMove compose(const EffectiveMove& left, const EffectiveMove& right, const ClassifiedBasis& basis_mid,
                      double tol = kDefaultTol);

// Classifies the middle step of a (possibly effective) pair of moves.
ClassifiedBasis classify_between(const EffectiveMove& left, const EffectiveMove& right, double tol = kDefaultTol);

// Effective Legendre maps including the multiplier terms.  multipliers are the
// values of x^nu ordered like eff.multipliers.
Vector effective_pre_momentum(const EffectiveMove& eff, const Vector& x_from, const Vector& x_to,
                              const Vector& multipliers);
Vector effective_post_momentum(const EffectiveMove& eff, const Vector& x_from, const Vector& x_to,
                               const Vector& multipliers);

std::vector<LinearConstraint> effective_constraints(const EffectiveMove& eff, const ClassifiedBasis& basis_from,
                                                    const ClassifiedBasis& basis_to, double tol = kDefaultTol);

struct ReclassReport {
    ClassifiedBasis before;  // against the last original move on the left
    ClassifiedBasis after;   // against the effective data
    Matrix h_effective;
    bool identity_rows_preserved = true;
    std::vector<std::string> notes;
};

// The shared step is classified against the original neighbouring moves (before)
// and against the effective data on both sides (after).
ReclassReport reclassify_onshell(const EffectiveMove& left, const EffectiveMove& right, double tol = kDefaultTol);

EffectiveMove chain_compose(const MoveSequence& seq, int from, int to, double tol = kDefaultTol);
// Right fold, used to cross-check fold-order independence.
EffectiveMove chain_compose_right(const MoveSequence& seq, int from, int to, double tol = kDefaultTol);

struct MonotonicityReport {
    int d_first = 0, d_second = 0, d_hessian = 0, d_effective = 0;
    bool holds = false;
};

MonotonicityReport count_monotonicity(const QuadraticMove& move1, const QuadraticMove& move2,
                                      const EffectiveMove& eff, double tol = kDefaultTol);
bool count_monotonicity_check(const QuadraticMove& move1, const QuadraticMove& move2, const EffectiveMove& eff,
                              double tol = kDefaultTol);

}  // namespace canonkit
