#pragma once

#include <complex>
#include <string>
#include <vector>

#include "canonkit/classify.hpp"
#include "canonkit/constraints.hpp"
#include "canonkit/evolution.hpp"
#include "canonkit/linalg.hpp"

namespace canonkit {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// exp(log_modulus) * exp(i pi/4 * i_exponent) * exp(i continuous_phase)
struct Amplitude {
    double log_modulus = 0.0;
    int i_exponent = 0;  // eighth roots of unity, kept in [0, 8)
    double continuous_phase = 0.0;

    double modulus() const;
    Complex value() const;
    void add_log(Complex z);  // multiply by exp(z)
    void add_eighths(int k);
    Amplitude& operator*=(const Amplitude& o);
};

// amplitude * exp(i(1/2 x_in A x_in + 1/2 x_out B x_out + x_in C x_out)/hbar) * prod_k delta(d_k . (x_in, x_out))
struct GaussianDeltaKernel {
    int in_step = 0;
    int out_step = 1;
    double hbar = 1.0;
    Amplitude amplitude;
    Matrix A, B, C;
    Matrix deltas;  // rows over (x_in, x_out)
    std::vector<std::string> delta_labels;
    // fixed-measure amplitude of the effective move, when it is defined (no deltas)
    bool has_normalized = false;
    Amplitude normalized;

    Index dim() const { return A.rows(); }
    Complex evaluate(const Vector& x_in, const Vector& x_out) const;  // deltas ignored
};

// amplitude * exp(i(1/2 x M x + j x)/hbar)
struct GaussianState {
    int step = 0;
    double hbar = 1.0;
    Amplitude amplitude;
    CMatrix M;
    CVector j;
    Matrix support;          // orthonormal columns: directions the square-integrable part depends on
    Matrix constraint_phase;  // real quadratic form fixed by the projection (zero if none)

    Index dim() const { return M.rows(); }
    Complex evaluate(const Vector& x) const;
    static GaussianState gaussian(int step, Index q, double hbar = 1.0);  // exp(-x.x / 2 hbar)
    static GaussianState constant(int step, Index q, double hbar = 1.0);
};

GaussianDeltaKernel propagator_from_move(const QuadraticMove& move, const ClassifiedBasis& basis_from,
                                         const ClassifiedBasis& basis_to, double hbar = 1.0,
                                         double tol = kDefaultTol);

// Improper projection onto the states annihilated by the constraints of the given side.
GaussianState project_physical(const GaussianState& state, const std::vector<LinearConstraint>& constraints,
                               MomentumSide side, double tol = kDefaultTol);

bool check_annihilation(const GaussianDeltaKernel& k, const LinearConstraint& c, MomentumSide side,
                        double tol = kDefaultTol);

GaussianDeltaKernel compose_kernels(const GaussianDeltaKernel& k1, const GaussianDeltaKernel& k2,
                                    const ClassifiedBasis& basis_mid, double tol = kDefaultTol);

// Integrates a pre-physical state at k.in_step against k over the pre-observables.
GaussianState evolve_state(const GaussianDeltaKernel& k, const GaussianState& state,
                           const ClassifiedBasis& basis_from, const ClassifiedBasis& basis_to,
                           double tol = kDefaultTol);

struct UnitarityReport {
    bool unitary = false;
    double modulus_ratio = 0.0;  // |measure|^2 (2 pi hbar)^N_A |det T_from||det T_to| / |det c_AB|
    double block_residual = 0.0;
    std::string reason;
};

UnitarityReport unitarity_report(const GaussianDeltaKernel& k, const ClassifiedBasis& basis_from,
                                 const ClassifiedBasis& basis_to, double tol = kDefaultTol);
bool unitarity_check(const GaussianDeltaKernel& k, const ClassifiedBasis& basis_from,
                     const ClassifiedBasis& basis_to, double tol = kDefaultTol);

// Q minus the number of independent constraints of the given side.
int hilbert_dims(const std::vector<LinearConstraint>& constraints, Index q, MomentumSide side,
                 double tol = kDefaultTol);

}  // namespace canonkit
