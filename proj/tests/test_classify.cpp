#include <doctest.h>

#include "canonkit/classify.hpp"
#include "canonkit/errors.hpp"
#include "canonkit/lattice.hpp"
#include "support.hpp"

using namespace canonkit;

namespace {

TypeCounts counts_of(std::initializer_list<std::pair<VectorType, int>> v) {
    TypeCounts c;
    for (auto [t, n] : v) c[t] = n;
    return c;
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

}  // namespace

TEST_CASE("fixture step counts") {
    for (double mass : {0.0, 0.5, 1.3}) {
        auto seq = expanding_square_sequence(2, mass).seq;
        CHECK(classify_step(seq, 0).counts == counts_of({{VectorType::I, 12}}));
        CHECK(classify_step(seq, 1).counts == counts_of({{VectorType::I, 8}, {VectorType::rho, 4}}));
        CHECK(classify_step(seq, 2).counts == counts_of({{VectorType::H, 8}, {VectorType::lambda, 4}}));
    }
}

TEST_CASE("degenerate and scalar cases") {
    for (Index q : {1, 3, 6}) {
        Matrix z = Matrix::Zero(q, q);
        auto b = classify_step(0, z, z, z);
        CHECK(b.counts[VectorType::I] == q);
        CHECK(b.counts.total() == q);
    }
    auto z = classify_step(1, scalar(1), scalar(1), scalar(0));
    CHECK(z.counts == counts_of({{VectorType::z, 1}}));
    auto g = classify_step(1, scalar(1), scalar(1), scalar(2));
    CHECK(g.counts == counts_of({{VectorType::gamma, 1}}));
    auto l = classify_step(1, scalar(1), scalar(0), scalar(0));
    CHECK(l.counts == counts_of({{VectorType::l, 1}}));
    auto r = classify_step(1, scalar(0), scalar(1), scalar(0));
    CHECK(r.counts == counts_of({{VectorType::r, 1}}));
    auto lam = classify_step(1, scalar(1), scalar(0), scalar(1));
    CHECK(lam.counts == counts_of({{VectorType::lambda, 1}}));
    auto h = classify_step(1, scalar(0), scalar(0), scalar(1));
    CHECK(h.counts == counts_of({{VectorType::H, 1}}));
    CHECK_THROWS_AS(classify_step(1, Matrix::Zero(2, 2), scalar(0), scalar(0)), InputError);
}

TEST_CASE("typed instances realise their counts") {
    testsupport::Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        int q = rng.integer(1, 6);
        auto counts = testsupport::random_counts(rng, q, true);
        auto inst = testsupport::typed_instance(rng, q, counts, 0);
        auto b = classify_step(1, inst.m1.c, inst.m2.c, inst.m1.b + inst.m2.a);
        for (size_t k = 0; k < 8; ++k) CHECK(b.counts.n[k] == counts[k]);
        CHECK(numeric_rank(b.T) == q);
    }
}

TEST_CASE("left/right balance across a move") {
    auto seq = expanding_square_sequence(3, 0.4).seq;
    for (const auto& m : seq.moves) {
        auto from = classify_step(seq, m.step_from);
        auto to = classify_step(seq, m.step_to);
        CHECK(from.left_null_rows().size() == to.right_null_rows().size());
        Matrix cab = from.rows(from.pre_observable_rows()) * m.c * to.rows(to.post_observable_rows()).transpose();
        CHECK(cab.rows() == cab.cols());
    }
}

TEST_CASE("basis_from_rows") {
    auto seq = expanding_square_sequence(2, 0.0).seq;
    auto sm = step_matrices(seq, 2);
    auto b = basis_from_rows(2, example_basis_step2(12), sm.c_prev, sm.c_next, sm.h);
    CHECK(b.counts == counts_of({{VectorType::H, 8}, {VectorType::lambda, 4}}));
    auto s1 = step_matrices(seq, 1);
    auto b1 = basis_from_rows(1, example_basis_step1(12), s1.c_prev, s1.c_next, s1.h);
    CHECK(b1.counts == counts_of({{VectorType::I, 8}, {VectorType::rho, 4}}));
    for (int i = 0; i < 4; ++i) CHECK(b1.labels[i] == VectorType::rho);
    Matrix bad = Matrix::Identity(12, 12);
    bad.row(5) += bad.row(0);  // the I rows no longer span the left null space
    CHECK_THROWS_AS(basis_from_rows(1, bad, s1.c_prev, s1.c_next, s1.h), InputError);
    CHECK_THROWS_AS(basis_from_rows(1, Matrix::Zero(12, 12), s1.c_prev, s1.c_next, s1.h), DegeneracyError);
}

TEST_CASE("split_variables") {
    ClassifiedBasis b = classify_step(0, scalar(1), scalar(1), scalar(2));
    b.T = scalar(2);
    auto s = split_variables(b, scalar(3), scalar(5));
    Vector x = Vector::Constant(1, 4.0), p = Vector::Constant(1, 1.0);
    CHECK(s.split_x(x)(0) == doctest::Approx(2.0));
    CHECK(s.pre_pi(x, p)(0) == doctest::Approx(2 * 1 + 2 * 3 * 4));
    CHECK(s.post_pi(x, p)(0) == doctest::Approx(2 * 1 - 2 * 5 * 4));
    CHECK(symplectic_residual(s.jacobian(true)) < 1e-14);
    CHECK(symplectic_residual(s.jacobian(false)) < 1e-14);

    auto id = split_variables(classify_step(0, Matrix::Zero(3, 3), Matrix::Zero(3, 3), Matrix::Zero(3, 3)),
                              Matrix(), Matrix());
    Vector p3 = Vector::LinSpaced(3, 1, 3);
    CHECK(max_abs(id.pre_pi(Vector::Ones(3), p3) - id.basis.T * p3) == 0.0);

    testsupport::Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        auto inst = testsupport::typed_instance(rng, 4, testsupport::random_counts(rng, 4, true), 0);
        auto cb = classify_step(1, inst.m1.c, inst.m2.c, inst.m1.b + inst.m2.a);
        auto sv = split_variables(cb, inst.m2.a, inst.m1.b);
        CHECK(symplectic_residual(sv.jacobian(true)) < 1e-10);
        CHECK(symplectic_residual(sv.jacobian(false)) < 1e-10);
    }
}

TEST_CASE("split trivialises the constraints of the fixture") {
    const double mass = 0.6, m2 = mass * mass;
    auto seq = expanding_square_sequence(2, mass).seq;
    auto sm = step_matrices(seq, 1);
    auto b1 = basis_from_rows(1, example_basis_step1(12), sm.c_prev, sm.c_next, sm.h);
    auto s = split_variables(b1, seq.moves[1].a, seq.moves[0].b);
    // -pi^1_1 = -p^1_1 + (6 + 3m^2/2) phi^1_1 - phi^2_1 - phi^4_1
    Vector x = Vector::Zero(12), p = Vector::Zero(12);
    x(0) = 1.0;
    CHECK(s.pre_pi(x, p)(0) == doctest::Approx(6 + 1.5 * m2));
    CHECK(s.pre_pi(x, p)(1) == doctest::Approx(-1.0));
    CHECK(s.pre_pi(x, p)(3) == doctest::Approx(-1.0));
}

TEST_CASE("hessian_block") {
    ClassifiedBasis b = classify_step(0, Matrix::Identity(2, 2), Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    b.T = Matrix::Identity(2, 2);
    Matrix h(2, 2);
    h << 2, 1, 1, 2;
    Matrix blk = hessian_block(b, h, std::vector<Index>{0}, std::vector<Index>{1});
    CHECK(blk.rows() == 1);
    CHECK(blk(0, 0) == 1.0);
    CHECK(max_abs(hessian_block(b, Matrix::Zero(2, 2), {VectorType::gamma}, {VectorType::gamma})) == 0.0);

    const double mass = 0.8, m2 = mass * mass;
    auto seq = expanding_square_sequence(2, mass).seq;
    auto sm = step_matrices(seq, 1);
    auto b1 = basis_from_rows(1, example_basis_step1(12), sm.c_prev, sm.c_next, sm.h);
    Matrix rr = hessian_block(b1, sm.h, {VectorType::rho}, {VectorType::rho});
    REQUIRE(rr.rows() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(rr(i, i) == doctest::Approx(8 + 2 * m2));
        CHECK(rr(i, (i + 1) % 4) == doctest::Approx(-2.0));
        CHECK(rr(i, (i + 2) % 4) == doctest::Approx(0.0));
    }
}

TEST_CASE("type names round trip") {
    for (auto t : kAllTypes) CHECK(parse_type(type_name(t)) == t);
    CHECK_THROWS_AS(parse_type("omega"), InputError);
}
