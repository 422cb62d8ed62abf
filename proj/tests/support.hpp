#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <random>

#include "canonkit/classify.hpp"
#include "canonkit/constraints.hpp"
#include "canonkit/effective.hpp"
#include "canonkit/evolution.hpp"
#include "canonkit/lattice.hpp"
#include "canonkit/quantum.hpp"

namespace testsupport {

using canonkit::Index;
using canonkit::Matrix;
using canonkit::QuadraticMove;
using canonkit::Vector;
using Complex = std::complex<double>;

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
};

Matrix random_matrix(Rng& rng, Index r, Index c);
Matrix random_symmetric(Rng& rng, Index n);
Matrix random_orthogonal(Rng& rng, Index n);
Vector random_vector(Rng& rng, Index n);

// Type counts at the middle step, ordered like canonkit::kAllTypes.
using Counts = std::array<int, 8>;
Counts random_counts(Rng& rng, int q, bool allow_nu, bool allow_identity = true);

// Two moves around a middle step whose null spaces realise the given counts exactly.
// Rows of O are the type coordinates, listed in kAllTypes order.
struct TypedInstance {
    QuadraticMove m1, m2;
    Counts counts{};
    Matrix O;
    std::vector<canonkit::VectorType> row_types;
};
TypedInstance typed_instance(Rng& rng, int q, const Counts& counts, int first_step = 0);

// Pre-momenta at the first step and post-momenta at the last step obtained by two
// canonical solves with momentum matching, compared with the effective Legendre maps.
struct EquivalenceResult {
    double pre_residual = 0.0;
    double post_residual = 0.0;
    double middle_residual = 0.0;  // x_1 from the canonical solve vs the boundary solve
    double scale = 1.0;
};
EquivalenceResult classical_equivalence(Rng& rng, const TypedInstance& inst);

Matrix paper_basis_step2_rows();  // the worked example's T_2 written out row by row

// Independent oracles.
// Cyclic Jacobi eigen-decomposition of a symmetric matrix: sym = V diag(evals) V^T.
void jacobi_eigen(const Matrix& sym, Vector& evals, Matrix& V);
// integral over R of exp(i(lambda y^2 / 2 + q y)/hbar), trapezoid rule with Gaussian
// damping exp(-eps y^2) and Richardson extrapolation eps -> 0.
Complex fresnel_quadrature(double lambda, double q, double hbar);
// integral over R^n of exp(i(x h x / 2 + j x)/hbar) through the eigenbasis of h.
Complex gaussian_quadrature(const Matrix& h, const Vector& j, double hbar);
// integral over X of integral over t of g(t) exp(i X kappa t / hbar) with g(t) = exp(-t^2 / 2 sigma^2),
// by nested Simpson rules; the delta-function limit is 2 pi hbar g(0) / |kappa|.
Complex smeared_delta(double kappa, double hbar, double sigma = 0.5, int n = 600);
// integral over x_1 of K1(x_0, x_1) K2(x_1, x_2) for two kernels without deltas, through
// gaussian_quadrature on the exponent quadratic in x_1.
Complex composed_by_quadrature(const canonkit::GaussianDeltaKernel& k1, const canonkit::GaussianDeltaKernel& k2,
                               const Vector& x0, const Vector& x2);
// composite Simpson rule on [lo, hi] with n (even) intervals
template <class F>
auto simpson(F&& f, double lo, double hi, int n) -> decltype(f(0.0)) {
    const double h = (hi - lo) / n;
    auto acc = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return acc * (h / 3.0);
}

}  // namespace testsupport
