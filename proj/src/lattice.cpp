#include "canonkit/lattice.hpp"

#include <map>

#include "canonkit/errors.hpp"

namespace canonkit {

namespace {

bool same_edge(const WeightedEdge& e, const VertexRef& a, const VertexRef& b) {
    return (e.u == a && e.v == b) || (e.u == b && e.v == a);
}

std::vector<std::array<int, 2>> ring_square_corners(int k) {
    // lower-left corners of the unit squares between ring k and ring k+1
    std::vector<std::array<int, 2>> out;
    for (int x = -k; x <= k; ++x)
        for (int y = -k; y <= k; ++y) {
            bool inside = x >= -(k - 1) && x + 1 <= k && y >= -(k - 1) && y + 1 <= k;
            if (!inside) out.push_back({x, y});
        }
    return out;
}

}  // namespace

void StepGraph::validate() const {
    auto check = [&](const VertexRef& v) {
        if (v.index < 0 || v.index >= (v.to ? n_to : n_from)) throw InputError("StepGraph: vertex out of range");
    };
    for (const auto& sq : squares)
        for (const auto& v : sq) check(v);
    auto check_edges = [&](const std::vector<WeightedEdge>& es) {
        for (size_t i = 0; i < es.size(); ++i) {
            check(es[i].u);
            check(es[i].v);
            if (es[i].u == es[i].v) throw InputError("StepGraph: loop edge");
            for (size_t j = 0; j < i; ++j)
                if (same_edge(es[j], es[i].u, es[i].v)) throw InputError("StepGraph: duplicate edge");
        }
    };
    check_edges(intra_edges);
    check_edges(cross_edges);
    if (mass < 0) throw InputError("StepGraph: mass must be non-negative");
}

StepGraph graph_from_squares(int step_from, int step_to, Index n_from, Index n_to, double mass,
                             const std::vector<std::array<VertexRef, 4>>& squares) {
    StepGraph g;
    g.step_from = step_from;
    g.step_to = step_to;
    g.n_from = n_from;
    g.n_to = n_to;
    g.mass = mass;
    g.squares = squares;
    g.mass_from.assign(static_cast<size_t>(n_from), 0.0);
    g.mass_to.assign(static_cast<size_t>(n_to), 0.0);
    auto add = [](std::vector<WeightedEdge>& es, VertexRef a, VertexRef b) {
        for (auto& e : es)
            if (same_edge(e, a, b)) {
                e.weight += 0.5;
                return;
            }
        es.push_back({a, b, 0.5});
    };
    for (const auto& sq : squares) {
        for (int i = 0; i < 4; ++i) {
            VertexRef a = sq[i], b = sq[(i + 1) % 4];
            if (a.to == b.to) add(g.intra_edges, a, b);
            else add(g.cross_edges, a.to ? b : a, a.to ? a : b);
            const auto& v = sq[i];
            if (v.index < 0 || v.index >= (v.to ? n_to : n_from)) throw InputError("StepGraph: vertex out of range");
            (v.to ? g.mass_to : g.mass_from)[static_cast<size_t>(v.index)] += 1.0;
        }
    }
    g.validate();
    return g;
}

RaggedMove move_from_graph(const StepGraph& g) {
    g.validate();
    RaggedMove m;
    m.step_from = g.step_from;
    m.step_to = g.step_to;
    m.a = Matrix::Zero(g.n_from, g.n_from);
    m.b = Matrix::Zero(g.n_to, g.n_to);
    m.c = Matrix::Zero(g.n_from, g.n_to);
    const double m2 = g.mass * g.mass;
    for (const auto& e : g.intra_edges) {
        Matrix& t = e.u.to ? m.b : m.a;
        t(e.u.index, e.u.index) += 2.0 * e.weight;
        t(e.v.index, e.v.index) += 2.0 * e.weight;
        t(e.u.index, e.v.index) -= 2.0 * e.weight;
        t(e.v.index, e.u.index) -= 2.0 * e.weight;
    }
    for (const auto& e : g.cross_edges) {
        m.a(e.u.index, e.u.index) += 2.0 * e.weight;
        m.b(e.v.index, e.v.index) += 2.0 * e.weight;
        m.c(e.u.index, e.v.index) -= 2.0 * e.weight;
    }
    // m^2/4 phi^2 per square and vertex
    for (Index i = 0; i < g.n_from; ++i) m.a(i, i) += 0.5 * m2 * g.mass_from[static_cast<size_t>(i)];
    for (Index i = 0; i < g.n_to; ++i) m.b(i, i) += 0.5 * m2 * g.mass_to[static_cast<size_t>(i)];
    return m;
}

std::vector<std::array<int, 2>> ring_coordinates(int k) {
    if (k < 1) throw InputError("ring_coordinates: ring index must be positive");
    const int lo = -(k - 1), hi = k;
    std::vector<std::array<int, 2>> v = {{lo, hi}, {hi, hi}, {hi, lo}, {lo, lo}};
    for (int y = lo + 1; y < hi; ++y) v.push_back({lo, y});  // left side, upwards
    for (int x = lo + 1; x < hi; ++x) v.push_back({x, hi});  // top, rightwards
    for (int y = hi - 1; y > lo; --y) v.push_back({hi, y});  // right side, downwards
    for (int x = hi - 1; x > lo; --x) v.push_back({x, lo});  // bottom, leftwards
    return v;
}

ExpandingSquare expanding_square_sequence(int n_steps, double mass) {
    if (n_steps < 1) throw InputError("expanding_square_sequence: need at least one step");
    if (mass < 0) throw InputError("expanding_square_sequence: mass must be non-negative");
    ExpandingSquare out;
    out.coords.emplace_back();  // step 0 is empty
    for (int k = 1; k <= n_steps; ++k) out.coords.push_back(ring_coordinates(k));
    std::vector<RaggedMove> ragged;
    for (int k = 0; k < n_steps; ++k) {
        std::map<std::array<int, 2>, VertexRef> where;
        for (size_t i = 0; i < out.coords[k].size(); ++i) where[out.coords[k][i]] = {false, static_cast<Index>(i)};
        for (size_t i = 0; i < out.coords[k + 1].size(); ++i)
            where[out.coords[k + 1][i]] = {true, static_cast<Index>(i)};
        std::vector<std::array<int, 2>> corners;
        if (k == 0) corners = {{0, 0}};
        else corners = ring_square_corners(k);
        std::vector<std::array<VertexRef, 4>> squares;
        for (const auto& c : corners) {
            std::array<std::array<int, 2>, 4> pts = {
                {{c[0], c[1]}, {c[0] + 1, c[1]}, {c[0] + 1, c[1] + 1}, {c[0], c[1] + 1}}};
            std::array<VertexRef, 4> sq;
            for (int i = 0; i < 4; ++i) sq[i] = where.at(pts[i]);
            squares.push_back(sq);
        }
        StepGraph g = graph_from_squares(k, k + 1, static_cast<Index>(out.coords[k].size()),
                                         static_cast<Index>(out.coords[k + 1].size()), mass, squares);
        ragged.push_back(move_from_graph(g));
        out.graphs.push_back(std::move(g));
        out.provenance.push_back(k + 1 <= 2 ? "worked example" : "generated, unvalidated");
    }
    out.seq = extend_to_square(ragged, 1.0);
    return out;
}

Matrix example_basis_step1(Index q) {
    if (q < 4) throw InputError("example_basis_step1: need at least four slots");
    return Matrix::Identity(q, q);
}

Matrix example_basis_step2(Index q) {
    if (q < 12) throw InputError("example_basis_step2: need at least twelve slots");
    Matrix t = Matrix::Identity(q, q);
    t.topLeftCorner(12, 12).setZero();
    auto e = [](Index i) { return i - 1; };
    const std::array<std::array<int, 2>, 4> diffs = {{{12, 5}, {11, 10}, {9, 8}, {7, 6}}};
    for (Index r = 0; r < 4; ++r) {
        t(r, e(diffs[r][0])) = 1.0;
        t(r, e(diffs[r][1])) = -1.0;
    }
    for (Index r = 0; r < 4; ++r) t(4 + r, r) = 1.0;
    const std::array<int, 4> singles = {9, 7, 11, 12};
    for (Index r = 0; r < 4; ++r) t(8 + r, e(singles[r])) = 1.0;
    return t;
}

}  // namespace canonkit
