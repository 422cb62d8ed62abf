#pragma once

#include <string>
#include <vector>

#include "canonkit/linalg.hpp"

namespace canonkit {

// S(x_from, x_to) = 1/2 x_from^T a x_from + 1/2 x_to^T b x_to + x_from^T c x_to
struct QuadraticMove {
    int step_from = 0;
    int step_to = 1;
    Matrix a;
    Matrix b;
    Matrix c;

    Index dim() const { return a.rows(); }
    double action(const Vector& x_from, const Vector& x_to) const;
};

// Slot of each original variable of a step inside the padded configuration space.
struct SlotMap {
    int step = 0;
    std::vector<Index> slots;
};

struct MoveSequence {
    Index Q = 0;
    double hbar = 1.0;
    std::vector<QuadraticMove> moves;
    std::vector<SlotMap> slot_maps;

    int first_step() const { return moves.empty() ? 0 : moves.front().step_from; }
    int last_step() const { return moves.empty() ? 0 : moves.back().step_to; }
    const QuadraticMove* move_into(int step) const;
    const QuadraticMove* move_out_of(int step) const;
    // b of the move into the step plus a of the move out of it
    Matrix hessian(int step) const;
};

struct RaggedMove {
    int step_from = 0;
    int step_to = 1;
    Matrix a;  // Q- x Q-
    Matrix b;  // Q+ x Q+
    Matrix c;  // Q- x Q+
};

MoveSequence extend_to_square(const std::vector<RaggedMove>& moves, double hbar = 1.0);
// Same, placing each step's variables at explicit slots of a common space of size q.
MoveSequence extend_to_square(const std::vector<RaggedMove>& moves, const std::vector<SlotMap>& maps,
                              Index q, double hbar = 1.0);
std::vector<RaggedMove> to_ragged(const MoveSequence& seq);

// pre:  -p^{n-1} = pre_from * x_{n-1} + pre_to * x_n
// post: +p^n     = post_to * x_n + post_from * x_{n-1}
struct LegendreMaps {
    Matrix pre_from;
    Matrix pre_to;
    Matrix post_to;
    Matrix post_from;

    Vector pre_momentum(const Vector& x_from, const Vector& x_to) const;
    Vector post_momentum(const Vector& x_from, const Vector& x_to) const;
};

LegendreMaps legendre(const QuadraticMove& move);

std::vector<std::string> validate(const MoveSequence& seq, double tol = kDefaultTol);

}  // namespace canonkit
