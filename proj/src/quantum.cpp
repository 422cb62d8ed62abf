#include "canonkit/quantum.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "canonkit/errors.hpp"

namespace canonkit {

namespace {

constexpr double kPi = std::numbers::pi;

int mod8(int k) { return ((k % 8) + 8) % 8; }

// log of the integral of exp(-1/2 s N s) over R^k for N with positive definite
// symmetric part (or a nonsingular purely imaginary limit), principal branch per eigenvalue
Complex log_gaussian_integral(const CMatrix& n) {
    const Index k = n.rows();
    Complex acc(0.5 * static_cast<double>(k) * std::log(2.0 * kPi), 0.0);
    if (k == 0) return acc;
    Eigen::ComplexEigenSolver<CMatrix> es(n, false);
    for (Index i = 0; i < k; ++i) acc -= 0.5 * std::log(es.eigenvalues()(i));
    return acc;
}

CMatrix symmetrize(const CMatrix& m) { return 0.5 * (m + m.transpose()); }

void check_kernel(const GaussianDeltaKernel& k, const char* what) {
    const Index q = k.A.rows();
    if (k.B.rows() != q || k.C.rows() != q || k.C.cols() != q || k.A.cols() != q || k.B.cols() != q)
        throw InputError(std::string(what) + ": kernel blocks have inconsistent dimensions");
    if (k.deltas.size() && k.deltas.cols() != 2 * q)
        throw InputError(std::string(what) + ": delta rows must span (x_in, x_out)");
    if (!(k.hbar > 0)) throw InputError(std::string(what) + ": hbar must be positive");
}

Index delta_count(const GaussianDeltaKernel& k) { return k.deltas.cols() ? k.deltas.rows() : 0; }

}  // namespace

double Amplitude::modulus() const { return std::exp(log_modulus); }

Complex Amplitude::value() const {
    return std::polar(std::exp(log_modulus), kPi / 4.0 * i_exponent + continuous_phase);
}

void Amplitude::add_log(Complex z) {
    log_modulus += z.real();
    continuous_phase += z.imag();
}

void Amplitude::add_eighths(int k) { i_exponent = mod8(i_exponent + k); }

Amplitude& Amplitude::operator*=(const Amplitude& o) {
    log_modulus += o.log_modulus;
    add_eighths(o.i_exponent);
    continuous_phase += o.continuous_phase;
    return *this;
}

Complex GaussianDeltaKernel::evaluate(const Vector& x_in, const Vector& x_out) const {
    double s = 0.5 * x_in.dot(A * x_in) + 0.5 * x_out.dot(B * x_out) + x_in.dot(C * x_out);
    return amplitude.value() * std::exp(Complex(0.0, s / hbar));
}

Complex GaussianState::evaluate(const Vector& x) const {
    CVector xc = x.cast<Complex>();
    Complex s = 0.5 * (xc.transpose() * M * xc)(0) + (j.transpose() * xc)(0);
    return amplitude.value() * std::exp(Complex(0.0, 1.0) * s / hbar);
}

GaussianState GaussianState::gaussian(int step, Index q, double hbar) {
    GaussianState s;
    s.step = step;
    s.hbar = hbar;
    s.M = Complex(0.0, 1.0) * CMatrix::Identity(q, q);
    s.j = CVector::Zero(q);
    s.support = Matrix::Identity(q, q);
    s.constraint_phase = Matrix::Zero(q, q);
    return s;
}

GaussianState GaussianState::constant(int step, Index q, double hbar) {
    GaussianState s = gaussian(step, q, hbar);
    s.M = CMatrix::Zero(q, q);
    return s;
}

GaussianDeltaKernel propagator_from_move(const QuadraticMove& move, const ClassifiedBasis& basis_from,
                                         const ClassifiedBasis& basis_to, double hbar, double tol) {
    if (!(hbar > 0)) throw InputError("propagator_from_move: hbar must be positive");
    if (basis_from.step != move.step_from || basis_to.step != move.step_to)
        throw InputError("propagator_from_move: bases do not match the move");
    auto A = basis_from.pre_observable_rows();
    auto B = basis_to.post_observable_rows();
    if (A.size() != B.size()) throw DegeneracyError("propagator_from_move: observable counts differ");
    const Index na = static_cast<Index>(A.size());
    Matrix cab = observable_block(move, basis_from, basis_to);
    if (na > 0 && numeric_rank(cab, tol) < na) throw DegeneracyError("propagator_from_move: c_AB is singular");
    GaussianDeltaKernel k;
    k.in_step = move.step_from;
    k.out_step = move.step_to;
    k.hbar = hbar;
    k.A = move.a;
    k.B = move.b;
    k.C = move.c;
    k.deltas = Matrix(0, 2 * move.dim());
    // sqrt((-2 pi i hbar)^-N_A |det c_AB| / (|det T_from| |det T_to|))
    k.amplitude.log_modulus = 0.5 * (-static_cast<double>(na) * std::log(2.0 * kPi * hbar) + log_abs_det(cab) -
                                     log_abs_det(basis_from.T) - log_abs_det(basis_to.T));
    k.amplitude.add_eighths(static_cast<int>(na));
    k.has_normalized = true;
    k.normalized = k.amplitude;
    return k;
}

GaussianState project_physical(const GaussianState& state, const std::vector<LinearConstraint>& constraints,
                               MomentumSide side, double tol) {
    const Index q = state.dim();
    const ConstraintKind want = side == MomentumSide::pre ? ConstraintKind::pre : ConstraintKind::post;
    std::vector<const LinearConstraint*> use;
    for (const auto& c : constraints) {
        if (c.step != state.step) throw InputError("project_physical: constraint lives on another step");
        if (c.kind != want) continue;
        if (c.p_coeffs.size() != q || c.x_coeffs.size() != q)
            throw InputError("project_physical: constraint dimension mismatch");
        use.push_back(&c);
    }
    if (use.empty()) return state;
    const Index k = static_cast<Index>(use.size());
    Matrix U(q, k), V(q, k);
    for (Index i = 0; i < k; ++i) {
        U.col(i) = use[i]->p_coeffs;
        V.col(i) = use[i]->x_coeffs;
    }
    // orthonormal recombination of the constraints along their momentum parts
    Eigen::JacobiSVD<Matrix> svd(U, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    Index r = 0;
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > tol * std::max(1.0, s(0)) * static_cast<double>(std::max(q, k))) ++r;
    Matrix stacked(2 * q, k);
    stacked << U, V;
    if (numeric_rank(stacked, tol) > r)
        throw ConstraintError("project_physical: configuration-only constraints cannot be projected");
    Matrix Uo = svd.matrixU().leftCols(r);
    Matrix W = -V * svd.matrixV().leftCols(r) * s.head(r).cwiseInverse().asDiagonal();
    Matrix uw = Uo.transpose() * W;
    if (max_abs(uw - uw.transpose()) > 1e3 * tol * std::max(1.0, max_abs(uw)))
        throw ConstraintError("project_physical: constraints are not first class among themselves");
    uw = 0.5 * (uw + uw.transpose());
    Matrix G = W * Uo.transpose() + Uo * W.transpose() - Uo * uw * Uo.transpose();
    G = 0.5 * (G + G.transpose());

    // exp(i/hbar(1/2 x M' x + j x)) averaged along the orbits x + Uo t
    CMatrix Mp = symmetrize(state.M) - G.cast<Complex>();
    CMatrix N = Uo.cast<Complex>().transpose() * Mp * Uo.cast<Complex>();
    N = symmetrize(N);
    Matrix im = N.imag();
    Eigen::SelfAdjointEigenSolver<Matrix> ies(0.5 * (im + im.transpose()), Eigen::EigenvaluesOnly);
    double scale = std::max(1.0, N.cwiseAbs().maxCoeff());
    if (ies.eigenvalues().minCoeff() <= tol * scale * static_cast<double>(q)) {
        std::ostringstream os;
        os << "project_physical: state is not normalizable along the constraint orbits at step " << state.step
           << (N.cwiseAbs().maxCoeff() <= tol * scale ? " (state already projected)" : "");
        throw DivergenceError(os.str());
    }
    CMatrix Ninv = N.inverse();
    CMatrix MU = Mp * Uo.cast<Complex>();
    CVector jU = Uo.cast<Complex>().transpose() * state.j;
    GaussianState out = state;
    out.M = symmetrize(Mp - MU * Ninv * MU.transpose()) + G.cast<Complex>();
    out.j = state.j - MU * (Ninv * jU);
    const Complex I(0.0, 1.0);
    // integral over t of exp(i/hbar(1/2 t N t + t.(U^T j))) in the normalization of exp(-1/2 t (-iN/hbar) t)
    out.amplitude.add_log(log_gaussian_integral(-I * N / state.hbar));
    Complex c0 = -0.5 * jU.transpose() * Ninv * jU;
    out.amplitude.add_log(I * c0 / state.hbar);
    Subspace perp = orthogonal_complement(column_span(Uo, q), tol);
    Subspace sup = intersect(column_span(state.support, q), perp, tol);
    out.support = sup.basis;
    out.constraint_phase = G;
    return out;
}

bool check_annihilation(const GaussianDeltaKernel& k, const LinearConstraint& c, MomentumSide side, double tol) {
    check_kernel(k, "check_annihilation");
    const Index q = k.dim();
    const bool post = side == MomentumSide::post;
    if (c.step != (post ? k.out_step : k.in_step)) throw InputError("check_annihilation: constraint step mismatch");
    if (c.p_coeffs.size() != q || c.x_coeffs.size() != q)
        throw InputError("check_annihilation: constraint dimension mismatch");
    if (c.x_coeffs_other.size() && c.x_coeffs_other.size() != q)
        throw InputError("check_annihilation: constraint dimension mismatch");
    const Vector& u = c.p_coeffs;
    Vector f_in(q), f_out(q);
    if (post) {
        // u.(-i hbar d_out) on the phase yields u.(B x_out + C^T x_in)
        f_out = k.B * u + c.x_coeffs;
        f_in = k.C * u;
        if (c.x_coeffs_other.size()) f_in += c.x_coeffs_other;
    } else {
        // pre momenta act as the conjugate derivative: -p = d_in S
        f_in = -(k.A * u) + c.x_coeffs;
        f_out = -(k.C.transpose() * u);
        if (c.x_coeffs_other.size()) f_out += c.x_coeffs_other;
    }
    Vector f(2 * q);
    f << f_in, f_out;
    double scale = std::max({1.0, max_abs(k.A), max_abs(k.B), max_abs(k.C)}) * std::max(1.0, u.cwiseAbs().maxCoeff());
    const Index nd = delta_count(k);
    if (nd == 0) return f.cwiseAbs().maxCoeff() <= 100.0 * tol * scale * static_cast<double>(q);
    // derivatives of the deltas along u must vanish
    Matrix side_part = post ? Matrix(k.deltas.rightCols(q)) : Matrix(k.deltas.leftCols(q));
    if ((side_part * u).cwiseAbs().maxCoeff() > 100.0 * tol * scale * static_cast<double>(q)) return false;
    Subspace rows = column_span(k.deltas.transpose(), 2 * q, tol);
    if (f.norm() <= 100.0 * tol * scale) return true;
    Vector res = f - rows.basis * (rows.basis.transpose() * f);
    return res.norm() <= 100.0 * tol * std::max(scale, f.norm()) * static_cast<double>(q);
}

GaussianDeltaKernel compose_kernels(const GaussianDeltaKernel& k1, const GaussianDeltaKernel& k2,
                                    const ClassifiedBasis& basis_mid, double tol) {
    check_kernel(k1, "compose_kernels");
    check_kernel(k2, "compose_kernels");
    if (k1.out_step != k2.in_step) throw InputError("compose_kernels: kernels are not adjacent");
    if (k1.dim() != k2.dim() || basis_mid.dim() != k1.dim()) throw InputError("compose_kernels: dimension mismatch");
    if (basis_mid.step != k1.out_step) throw InputError("compose_kernels: basis is not classified for the middle step");
    if (std::abs(k1.hbar - k2.hbar) > 1e-14 * k1.hbar) throw InputError("compose_kernels: hbar mismatch");
    const Index q = k1.dim();
    const double hbar = k1.hbar;
    const Index n1 = delta_count(k1), n2 = delta_count(k2);
    if ((n1 && max_abs(k1.deltas.rightCols(q)) > 0) || (n2 && max_abs(k2.deltas.leftCols(q)) > 0))
        throw InputError("compose_kernels: deltas on the integrated step are not supported");

    const Matrix& T = basis_mid.T;
    auto alpha = basis_mid.rows_where([](VectorType t) { return !in_hessian_null(t); });
    auto nu = basis_mid.rows_of({VectorType::l, VectorType::r, VectorType::z});
    Matrix h = k1.B + k2.A;
    // J(x_in, x_out) = C1^T x_in + C2 x_out as a map on the concatenated space
    Matrix J(q, 2 * q);
    J << k1.C.transpose(), k2.C;

    Matrix Ta = basis_mid.rows(alpha);
    Matrix H = Ta * h * Ta.transpose();
    H = 0.5 * (H + H.transpose());
    const Index na = static_cast<Index>(alpha.size());
    Matrix Hinv = Matrix::Zero(na, na);
    if (na > 0) {
        Eigen::JacobiSVD<Matrix> hs(H);
        double smax = std::max(hs.singularValues()(0), max_abs(h) * Ta.squaredNorm() / std::max<Index>(na, 1));
        if (hs.singularValues()(na - 1) <= tol * smax * static_cast<double>(q))
            throw DegeneracyError("compose_kernels: h on the alpha rows is singular");
        Hinv = H.fullPivLu().inverse();
        Hinv = 0.5 * (Hinv + Hinv.transpose());
    }
    // stationary value -1/2 J^T Ta^T H^-1 Ta J
    Matrix TJ = Ta * J;
    Matrix quad = -TJ.transpose() * Hinv * TJ;

    GaussianDeltaKernel out;
    out.in_step = k1.in_step;
    out.out_step = k2.out_step;
    out.hbar = hbar;
    out.A = k1.A + quad.topLeftCorner(q, q);
    out.B = k2.B + quad.bottomRightCorner(q, q);
    out.C = quad.topRightCorner(q, q);
    out.A = 0.5 * (out.A + out.A.transpose());
    out.B = 0.5 * (out.B + out.B.transpose());

    out.amplitude = k1.amplitude;
    out.amplitude *= k2.amplitude;
    // dx = |det T| dX; Fresnel integral over the alpha rows; 2 pi hbar per delta
    out.amplitude.log_modulus += log_abs_det(T) + 0.5 * static_cast<double>(na) * std::log(2.0 * kPi * hbar) -
                                 0.5 * log_abs_det(H) +
                                 static_cast<double>(nu.size()) * std::log(2.0 * kPi * hbar);
    out.amplitude.add_eighths(signature(H, tol));

    std::vector<Vector> rows;
    for (Index i = 0; i < n1; ++i) {
        rows.push_back(k1.deltas.row(i).transpose());
        out.delta_labels.push_back(k1.delta_labels.size() > static_cast<size_t>(i) ? k1.delta_labels[i] : "");
    }
    for (Index i = 0; i < n2; ++i) {
        rows.push_back(k2.deltas.row(i).transpose());
        out.delta_labels.push_back(k2.delta_labels.size() > static_cast<size_t>(i) ? k2.delta_labels[i] : "");
    }
    for (Index i : nu) {
        rows.push_back((T.row(i) * J).transpose());
        std::ostringstream os;
        VectorType t = basis_mid.labels[i];
        if (t == VectorType::l) os << "H^" << k1.in_step << "_l";
        else if (t == VectorType::r) os << "H^" << k2.out_step << "_r";
        else os << "B^" << k1.in_step << k2.out_step << "_z";
        os << "[" << i << "]";
        out.delta_labels.push_back(os.str());
    }
    out.deltas = Matrix(static_cast<Index>(rows.size()), 2 * q);
    for (size_t i = 0; i < rows.size(); ++i) out.deltas.row(static_cast<Index>(i)) = rows[i].transpose();
    if (out.deltas.rows() > 0) {
        if (out.deltas.cwiseAbs().rowwise().maxCoeff().minCoeff() == 0.0 ||
            numeric_rank(out.deltas, tol) < out.deltas.rows())
            throw DegeneracyError("compose_kernels: delta rows are dependent");
    }

    // fixed-measure amplitude of the effective move with orthonormal outer bases
    out.has_normalized = out.deltas.rows() == 0;
    if (out.has_normalized) {
        Eigen::JacobiSVD<Matrix> cs(out.C);
        const Vector& sv = cs.singularValues();
        double cscale = std::max({max_abs(k1.C) * max_abs(k2.C) * (na ? Hinv.cwiseAbs().maxCoeff() : 0.0),
                                  max_abs(out.C), 1e-300});
        int rank = 0;
        double logdet = 0.0;
        for (Index i = 0; i < sv.size(); ++i)
            if (sv(i) > tol * cscale * static_cast<double>(q)) {
                ++rank;
                logdet += std::log(sv(i));
            }
        out.normalized = Amplitude{};
        out.normalized.log_modulus = 0.5 * (-rank * std::log(2.0 * kPi * hbar) + logdet);
        out.normalized.add_eighths(rank);
    }
    return out;
}

GaussianState evolve_state(const GaussianDeltaKernel& k, const GaussianState& state,
                           const ClassifiedBasis& basis_from, const ClassifiedBasis& basis_to, double tol) {
    check_kernel(k, "evolve_state");
    const Index q = k.dim();
    if (state.step != k.in_step) throw InputError("evolve_state: state lives on another step");
    if (state.dim() != q) throw InputError("evolve_state: dimension mismatch");
    if (basis_from.step != k.in_step || basis_to.step != k.out_step)
        throw InputError("evolve_state: bases do not match the kernel");
    if (delta_count(k)) throw InputError("evolve_state: kernels with deltas are not supported");
    const Complex I(0.0, 1.0);
    auto A = basis_from.pre_observable_rows();
    auto L = basis_from.left_null_rows();
    const Matrix& T = basis_from.T;
    // in split coordinates X = T^-T x the integrand phase is 1/2 X (T (M + A) T^T) X + X.(T j) + X.(T C x_out)
    CMatrix Tc = T.cast<Complex>();
    CMatrix MX = Tc * (symmetrize(state.M) + k.A.cast<Complex>()) * Tc.transpose();
    CVector jX = Tc * state.j;
    double scale = std::max({1.0, MX.cwiseAbs().maxCoeff(), max_abs(k.A)});
    for (Index i : L) {
        if (MX.row(i).cwiseAbs().maxCoeff() > 1e3 * tol * scale * static_cast<double>(q) ||
            std::abs(jX(i)) > 1e3 * tol * std::max(1.0, jX.cwiseAbs().maxCoeff()))
            throw InputError("evolve_state: state is not pre-physical for the kernel (support mismatch)");
    }
    const Index na = static_cast<Index>(A.size());
    CMatrix N(na, na);
    CVector jA(na);
    for (Index r = 0; r < na; ++r) {
        jA(r) = jX(A[r]);
        for (Index c = 0; c < na; ++c) N(r, c) = MX(A[r], A[c]);
    }
    CMatrix CA = (basis_from.rows(A) * k.C).cast<Complex>();
    GaussianState out;
    out.step = k.out_step;
    out.hbar = state.hbar;
    out.amplitude = state.amplitude;
    out.amplitude *= k.amplitude;
    out.constraint_phase = k.B;
    if (na == 0) {
        out.M = k.B.cast<Complex>();
        out.j = CVector::Zero(q);
    } else {
        Eigen::FullPivLU<CMatrix> lu(N);
        if (!lu.isInvertible() || lu.rcond() < tol)
            throw DivergenceError("evolve_state: Gaussian over the pre-observables is singular");
        Matrix im = symmetrize(N).imag();
        Eigen::SelfAdjointEigenSolver<Matrix> ies(im, Eigen::EigenvaluesOnly);
        if (ies.eigenvalues().minCoeff() < -tol * scale)
            throw DivergenceError("evolve_state: state is not normalizable in the pre-observables");
        CMatrix Ninv = lu.inverse();
        out.M = symmetrize(k.B.cast<Complex>() - CA.transpose() * Ninv * CA);
        out.j = -CA.transpose() * (Ninv * jA);
        out.amplitude.add_log(log_gaussian_integral(-I * N / state.hbar));
        Complex c0 = -0.5 * jA.transpose() * Ninv * jA;
        out.amplitude.add_log(I * c0 / state.hbar);
    }
    out.support = basis_to.rows(basis_to.post_observable_rows()).transpose();
    if (out.support.cols()) out.support = column_span(out.support, q, tol).basis;
    return out;
}

UnitarityReport unitarity_report(const GaussianDeltaKernel& k, const ClassifiedBasis& basis_from,
                                 const ClassifiedBasis& basis_to, double tol) {
    check_kernel(k, "unitarity_check");
    UnitarityReport rep;
    if (delta_count(k)) {
        rep.reason = "kernel carries delta factors";
        return rep;
    }
    auto A = basis_from.pre_observable_rows();
    auto B = basis_to.post_observable_rows();
    if (A.size() != B.size()) {
        rep.reason = "observable counts differ";
        return rep;
    }
    Matrix cab = basis_from.rows(A) * k.C * basis_to.rows(B).transpose();
    const Index na = static_cast<Index>(A.size());
    if (na && numeric_rank(cab, tol) < na) {
        rep.reason = "c_AB is singular";
        return rep;
    }
    // the cross block must live on the observable pairs only
    double scale = std::max(1.0, max_abs(k.C));
    Matrix TL = basis_from.rows(basis_from.left_null_rows());
    Matrix TR = basis_to.rows(basis_to.right_null_rows());
    rep.block_residual = std::max(TL.rows() ? max_abs(TL * k.C) : 0.0, TR.rows() ? max_abs(k.C * TR.transpose()) : 0.0);
    double logr = 2.0 * k.amplitude.log_modulus + static_cast<double>(na) * std::log(2.0 * kPi * k.hbar) +
                  log_abs_det(basis_from.T) + log_abs_det(basis_to.T) - log_abs_det(cab);
    rep.modulus_ratio = std::exp(logr);
    bool phase_ok = k.amplitude.i_exponent == mod8(static_cast<int>(na)) &&
                    std::abs(std::remainder(k.amplitude.continuous_phase, 2.0 * kPi)) <= 1e-9;
    rep.unitary = std::abs(logr) <= std::max(tol, 1e-12) * 100.0 &&
                  rep.block_residual <= 100.0 * tol * scale && phase_ok;
    if (!rep.unitary) rep.reason = std::abs(logr) > 1e-8 ? "measure normalization fails" : "block structure fails";
    return rep;
}

bool unitarity_check(const GaussianDeltaKernel& k, const ClassifiedBasis& basis_from, const ClassifiedBasis& basis_to,
                     double tol) {
    return unitarity_report(k, basis_from, basis_to, tol).unitary;
}

int hilbert_dims(const std::vector<LinearConstraint>& constraints, Index q, MomentumSide side, double tol) {
    const ConstraintKind want = side == MomentumSide::pre ? ConstraintKind::pre : ConstraintKind::post;
    std::vector<Vector> rows;
    for (const auto& c : constraints)
        if (c.kind == want) {
            if (c.p_coeffs.size() != q) throw InputError("hilbert_dims: constraint dimension mismatch");
            rows.push_back(c.p_coeffs);
        }
    if (rows.empty()) return static_cast<int>(q);
    Matrix m(q, static_cast<Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) m.col(static_cast<Index>(i)) = rows[i];
    return static_cast<int>(q - numeric_rank(m, tol));
}

}  // namespace canonkit
