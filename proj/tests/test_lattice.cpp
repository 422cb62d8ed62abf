#include <doctest.h>

#include "canonkit/lattice.hpp"

using namespace canonkit;

namespace {

// The displayed matrices of the worked example, entered by hand (1-based vertex labels).
Matrix paper_b1(double m2) {
    Matrix b = Matrix::Zero(12, 12);
    for (int i = 0; i < 4; ++i) {
        b(i, i) = 2 + m2 / 2;
        b(i, (i + 1) % 4) = b((i + 1) % 4, i) = -1;
    }
    return b;
}

Matrix paper_a2(double m2) {
    Matrix a = Matrix::Zero(12, 12);
    for (int i = 0; i < 4; ++i) {
        a(i, i) = 1.5 * m2 + 6;
        a(i, (i + 1) % 4) = a((i + 1) % 4, i) = -1;
    }
    return a;
}

Matrix paper_b2(double m2) {
    Matrix b = Matrix::Zero(12, 12);
    for (int i = 1; i <= 4; ++i) b(i - 1, i - 1) = m2 / 2 + 2;
    for (int i = 5; i <= 12; ++i) b(i - 1, i - 1) = m2 + 4;
    auto edge = [&](int i, int j) { b(i - 1, j - 1) = b(j - 1, i - 1) = -1; };
    edge(1, 6), edge(1, 7), edge(2, 8), edge(2, 9), edge(3, 10), edge(3, 11), edge(4, 5), edge(4, 12);
    edge(5, 6), edge(7, 8), edge(9, 10), edge(11, 12);
    return b;
}

Matrix paper_c2() {
    Matrix c = Matrix::Zero(12, 12);
    auto edge = [&](int i, int j) { c(i - 1, j - 1) = -2; };
    edge(1, 6), edge(1, 7), edge(2, 8), edge(2, 9), edge(3, 10), edge(3, 11), edge(4, 5), edge(4, 12);
    return c;
}

}  // namespace

TEST_CASE("ring labels") {
    auto r1 = ring_coordinates(1);
    REQUIRE(r1.size() == 4);
    CHECK(r1[0] == std::array<int, 2>{0, 1});
    CHECK(r1[1] == std::array<int, 2>{1, 1});
    CHECK(r1[2] == std::array<int, 2>{1, 0});
    CHECK(r1[3] == std::array<int, 2>{0, 0});
    auto r2 = ring_coordinates(2);
    REQUIRE(r2.size() == 12);
    CHECK(r2[0] == std::array<int, 2>{-1, 2});
    CHECK(r2[3] == std::array<int, 2>{-1, -1});
    // vertex 5 sits on the left side next to the lower left corner, vertex 6 next to the upper left one
    CHECK(r2[4] == std::array<int, 2>{-1, 0});
    CHECK(r2[5] == std::array<int, 2>{-1, 1});
    CHECK(r2[6] == std::array<int, 2>{0, 2});
    CHECK(ring_coordinates(3).size() == 20);
}

TEST_CASE("worked example matrices") {
    for (double mass : {0.0, 0.5, 1.7}) {
        const double m2 = mass * mass;
        auto ex = expanding_square_sequence(2, mass);
        const auto& s = ex.seq;
        CHECK(s.Q == 12);
        REQUIRE(s.moves.size() == 2);
        CHECK(max_abs(s.moves[0].a) == 0.0);
        CHECK(max_abs(s.moves[0].c) == 0.0);
        CHECK(max_abs(s.moves[0].b - paper_b1(m2)) < 1e-14);
        CHECK(max_abs(s.moves[1].a - paper_a2(m2)) < 1e-14);
        CHECK(max_abs(s.moves[1].b - paper_b2(m2)) < 1e-14);
        CHECK(max_abs(s.moves[1].c - paper_c2()) < 1e-14);
        CHECK(validate(s).empty());
    }
}

TEST_CASE("mass only shifts diagonals") {
    auto a = expanding_square_sequence(3, 0.0).seq, b = expanding_square_sequence(3, 0.8).seq;
    for (size_t k = 0; k < a.moves.size(); ++k) {
        for (auto pick : {&QuadraticMove::a, &QuadraticMove::b}) {
            Matrix d = b.moves[k].*pick - a.moves[k].*pick;
            CHECK(max_abs(d - Matrix(d.diagonal().asDiagonal())) == 0.0);
            CHECK(d.diagonal().minCoeff() >= 0.0);
        }
        CHECK(max_abs(b.moves[k].c - a.moves[k].c) == 0.0);
    }
}

TEST_CASE("single move and provenance") {
    auto one = expanding_square_sequence(1, 0.3);
    CHECK(one.seq.moves.size() == 1);
    CHECK(one.seq.Q == 4);
    CHECK(max_abs(one.seq.moves[0].c) == 0.0);
    auto three = expanding_square_sequence(4, 0.3);
    CHECK(three.seq.Q == 28);
    CHECK(three.provenance[0].find("unvalidated") == std::string::npos);
    CHECK(three.provenance[1].find("unvalidated") == std::string::npos);
    CHECK(three.provenance[2].find("unvalidated") != std::string::npos);
    CHECK(validate(three.seq).empty());
}

TEST_CASE("c pattern equals cross adjacency and gluing is consistent") {
    auto ex = expanding_square_sequence(3, 0.6);
    for (size_t k = 0; k < ex.graphs.size(); ++k) {
        const auto& g = ex.graphs[k];
        g.validate();
        RaggedMove r = move_from_graph(g);
        Matrix pattern = Matrix::Zero(g.n_from, g.n_to);
        for (const auto& e : g.cross_edges) pattern(e.u.index, e.v.index) = 1;
        for (Index i = 0; i < g.n_from; ++i)
            for (Index j = 0; j < g.n_to; ++j) CHECK((r.c(i, j) != 0.0) == (pattern(i, j) != 0.0));
        CHECK(max_abs(r.a - r.a.transpose()) == 0.0);
        CHECK(max_abs(r.b - r.b.transpose()) == 0.0);
        // summing one-square graphs reproduces the glued move
        RaggedMove sum{g.step_from, g.step_to, Matrix::Zero(g.n_from, g.n_from), Matrix::Zero(g.n_to, g.n_to),
                       Matrix::Zero(g.n_from, g.n_to)};
        for (const auto& sq : g.squares) {
            auto single = move_from_graph(graph_from_squares(g.step_from, g.step_to, g.n_from, g.n_to, g.mass, {sq}));
            sum.a += single.a;
            sum.b += single.b;
            sum.c += single.c;
        }
        CHECK(max_abs(sum.a - r.a) < 1e-14);
        CHECK(max_abs(sum.b - r.b) < 1e-14);
        CHECK(max_abs(sum.c - r.c) < 1e-14);
    }
    auto empty = move_from_graph(graph_from_squares(0, 1, 2, 3, 1.0, {}));
    CHECK(max_abs(empty.a) + max_abs(empty.b) + max_abs(empty.c) == 0.0);
}

TEST_CASE("example bases") {
    CHECK(max_abs(example_basis_step1(12) - Matrix::Identity(12, 12)) == 0.0);
    Matrix t = example_basis_step2(12);
    CHECK(t(0, 11) == 1.0);
    CHECK(t(0, 4) == -1.0);
    CHECK(t(9, 6) == 1.0);
    CHECK(std::abs(std::abs(t.determinant()) - 1.0) < 1e-12);
    Matrix padded = example_basis_step2(20);
    CHECK(max_abs(padded.topLeftCorner(12, 12) - t) == 0.0);
    CHECK(max_abs(padded.bottomRightCorner(8, 8) - Matrix::Identity(8, 8)) == 0.0);
}
