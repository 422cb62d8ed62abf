#include <doctest.h>

#include "canonkit/errors.hpp"
#include "canonkit/linalg.hpp"
#include "support.hpp"

using namespace canonkit;

namespace {


Matrix fixture_c2() { return expanding_square_sequence(2, 0.0).seq.moves[1].c; }

Subspace span_of(std::initializer_list<int> idx, Index n) {
    Matrix b = Matrix::Zero(n, static_cast<Index>(idx.size()));
    Index k = 0;
    for (int i : idx) b(i, k++) = 1.0;
    return {n, b};
}

}  // namespace

TEST_CASE("numeric_rank") {
    CHECK(numeric_rank(Matrix::Zero(12, 12)) == 0);
    CHECK(numeric_rank(Matrix::Identity(4, 4)) == 4);
    CHECK(numeric_rank(fixture_c2()) == 4);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = std::nan("");
    CHECK_THROWS_AS(numeric_rank(bad), InputError);
    CHECK_THROWS_AS(numeric_rank(Matrix::Identity(2, 2), 0.0), InputError);
}

TEST_CASE("right and left null bases") {
    Matrix c2 = fixture_c2();
    Subspace r = right_null_basis(c2);
    CHECK(r.dim() == 8);
    Matrix r2(12, 8);
    r2.setZero();
    const int pairs[4][2] = {{11, 4}, {10, 9}, {8, 7}, {6, 5}};
    for (int k = 0; k < 4; ++k) {
        r2(pairs[k][0], k) = 1;
        r2(pairs[k][1], k) = -1;
        r2(k, 4 + k) = 1;
    }
    for (Index k = 0; k < 8; ++k) CHECK(contains(r, r2.col(k)));
    CHECK(right_null_basis(Matrix::Identity(3, 3)).dim() == 0);
    Matrix row(1, 2);
    row << 1, 1;
    Subspace s = right_null_basis(row);
    REQUIRE(s.dim() == 1);
    CHECK(std::abs(std::abs(s.basis(0, 0)) - 1 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(s.basis(0, 0) + s.basis(1, 0)) < 1e-12);

    Subspace l = left_null_basis(c2);
    CHECK(l.dim() == 8);
    CHECK(span_distance(l, span_of({4, 5, 6, 7, 8, 9, 10, 11}, 12)) < 1e-12);
    CHECK(left_null_basis(Matrix::Zero(1, 1)).dim() == 1);
    Matrix m(2, 2);
    m << 0, 1, 0, 0;
    Subspace ln = left_null_basis(m);
    REQUIRE(ln.dim() == 1);
    CHECK(std::abs(std::abs(ln.basis(1, 0)) - 1) < 1e-12);
}

TEST_CASE("null bases are orthonormal and deterministic") {
    testsupport::Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix m = testsupport::random_matrix(rng, 5, 3) * testsupport::random_matrix(rng, 3, 6);
        Subspace a = right_null_basis(m), b = right_null_basis(m);
        CHECK(a.dim() == 3);
        CHECK(max_abs(a.basis - b.basis) == 0.0);
        CHECK(max_abs(a.basis.transpose() * a.basis - Matrix::Identity(3, 3)) < 1e-12);
        CHECK(max_abs(m * a.basis) < 1e-10);
    }
}

TEST_CASE("intersect") {
    Subspace s = span_of({0, 2}, 4);
    CHECK(span_distance(intersect(s, s), s) < 1e-12);
    CHECK(intersect(span_of({0}, 2), span_of({1}, 2)).dim() == 0);
    Subspace r1 = right_null_basis(Matrix::Zero(12, 12));
    Subspace l1 = left_null_basis(fixture_c2());
    CHECK(span_distance(intersect(r1, l1), span_of({4, 5, 6, 7, 8, 9, 10, 11}, 12)) < 1e-12);
    // skew subspaces sharing one direction
    Matrix a(3, 2), b(3, 2);
    a << 1, 0, 1, 1, 0, 1;
    b << 1, 1, 1, 0, 0, 0;
    Subspace x = intersect(column_span(a, 3), column_span(b, 3));
    REQUIRE(x.dim() == 1);
    Vector v(3);
    v << 1, 1, 0;
    CHECK(contains(x, v));
    CHECK_THROWS_AS(intersect(span_of({0}, 2), span_of({0}, 3)), InputError);
}

TEST_CASE("restricted_inverse") {
    Matrix h(2, 2);
    h << 2, 0, 0, 0;
    Matrix r = restricted_inverse(h, span_of({0}, 2));
    CHECK(std::abs(r(0, 0) - 0.5) < 1e-14);
    CHECK(std::abs(r(1, 1)) < 1e-14);
    Matrix g(2, 2);
    g << 2, 1, 1, 2;
    Matrix gi = restricted_inverse(g, Subspace::full(2));
    Matrix expect(2, 2);
    expect << 2.0 / 3, -1.0 / 3, -1.0 / 3, 2.0 / 3;
    CHECK(max_abs(gi - expect) < 1e-14);
    CHECK(max_abs(g * gi - Matrix::Identity(2, 2)) < 1e-12);
    CHECK_THROWS_AS(restricted_inverse(h, span_of({1}, 2)), DegeneracyError);
    CHECK(max_abs(restricted_inverse(h, Subspace::zero(2))) == 0.0);
}

TEST_CASE("complement, sum and signature helpers") {
    Subspace outer = span_of({0, 1, 2}, 4);
    Subspace inner = span_of({1}, 4);
    Subspace c = complement_within(outer, inner);
    CHECK(c.dim() == 2);
    CHECK(span_distance(c, span_of({0, 2}, 4)) < 1e-12);
    CHECK(sum(span_of({0}, 3), span_of({1}, 3)).dim() == 2);
    CHECK(orthogonal_complement(span_of({0}, 3)).dim() == 2);
    Matrix d = Vector::LinSpaced(4, -1.5, 1.5).asDiagonal();
    CHECK(signature(d) == 0);
    CHECK(signature(Matrix::Identity(3, 3)) == 3);
    CHECK(std::abs(log_abs_det(2.0 * Matrix::Identity(3, 3)) - 3 * std::log(2.0)) < 1e-14);
    CHECK(log_abs_det(Matrix(0, 0)) == 0.0);
}
