#pragma once

#include <array>
#include <string>
#include <vector>

#include "canonkit/action.hpp"

namespace canonkit {

// A vertex of a move graph: on the earlier step (from) or the later step (to).
struct VertexRef {
    bool to = false;
    Index index = 0;
    bool operator==(const VertexRef&) const = default;
};

struct WeightedEdge {
    VertexRef u, v;
    double weight = 0.0;  // contributes weight * (phi_u - phi_v)^2
};

// Vertices of two consecutive steps and the unit squares between them.
struct StepGraph {
    int step_from = 0;
    int step_to = 1;
    Index n_from = 0;
    Index n_to = 0;
    double mass = 0.0;
    std::vector<std::array<VertexRef, 4>> squares;  // cyclic vertex order
    std::vector<WeightedEdge> intra_edges;          // both ends on the same step
    std::vector<WeightedEdge> cross_edges;          // from-step vertex first
    std::vector<double> mass_from, mass_to;         // multiplicity of each vertex in squares

    void validate() const;
};

// Per-square action 1/2 sum_edges (d phi)^2 + m^2/4 sum_vertices phi^2, summed over squares.
StepGraph graph_from_squares(int step_from, int step_to, Index n_from, Index n_to, double mass,
                             const std::vector<std::array<VertexRef, 4>>& squares);

RaggedMove move_from_graph(const StepGraph& g);

// Vertex coordinates of ring k (k >= 1): boundary of [-(k-1), k]^2, labeled with the
// corners first (UL, UR, LR, LL), then clockwise from the lowest vertex on the left side.
std::vector<std::array<int, 2>> ring_coordinates(int k);

struct ExpandingSquare {
    MoveSequence seq;
    std::vector<std::vector<std::array<int, 2>>> coords;  // per step
    std::vector<StepGraph> graphs;                        // per move
    std::vector<std::string> provenance;                  // per move
};

ExpandingSquare expanding_square_sequence(int n_steps, double mass);

// Explicit bases used in the worked example, padded by identity on spurious slots.
Matrix example_basis_step1(Index q);
Matrix example_basis_step2(Index q);

}  // namespace canonkit
