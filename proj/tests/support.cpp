#include "support.hpp"

#include <cmath>
#include <numbers>

namespace testsupport {

using canonkit::VectorType;

Matrix random_matrix(Rng& rng, Index r, Index c) {
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index k = 0; k < c; ++k) m(i, k) = rng.normal();
    return m;
}

Matrix random_symmetric(Rng& rng, Index n) {
    Matrix m = random_matrix(rng, n, n);
    return 0.5 * (m + m.transpose());
}

Matrix random_orthogonal(Rng& rng, Index n) {
    // Gram-Schmidt on a Gaussian matrix
    Matrix m = random_matrix(rng, n, n);
    for (Index k = 0; k < n; ++k) {
        for (Index j = 0; j < k; ++j) m.col(k) -= m.col(j).dot(m.col(k)) * m.col(j);
        m.col(k).normalize();
    }
    return m;
}

Vector random_vector(Rng& rng, Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = rng.normal();
    return v;
}

Counts random_counts(Rng& rng, int q, bool allow_nu, bool allow_identity) {
    Counts c{};
    std::vector<int> allowed;
    for (int t = 0; t < 8; ++t) {
        auto vt = canonkit::kAllTypes[static_cast<size_t>(t)];
        if (!allow_nu && canonkit::in_hessian_null(vt)) continue;
        if (!allow_identity && vt == VectorType::I) continue;
        allowed.push_back(t);
    }
    for (int i = 0; i < q; ++i) c[static_cast<size_t>(allowed[static_cast<size_t>(rng.integer(0, static_cast<int>(allowed.size()) - 1))])]++;
    return c;
}

namespace {

// Symmetric matrix with eigenvalues of modulus in [0.5, 2] and random signs.
Matrix well_conditioned_symmetric(Rng& rng, Index n) {
    if (n == 0) return Matrix(0, 0);
    Matrix o = random_orthogonal(rng, n);
    Vector d(n);
    for (Index i = 0; i < n; ++i) d(i) = (rng.uniform(0, 1) < 0.5 ? -1.0 : 1.0) * rng.uniform(0.5, 2.0);
    return o * d.asDiagonal() * o.transpose();
}

Matrix selector(const std::vector<VectorType>& types, bool (*keep)(VectorType)) {
    std::vector<Index> idx;
    for (size_t i = 0; i < types.size(); ++i)
        if (keep(types[i])) idx.push_back(static_cast<Index>(i));
    Matrix e = Matrix::Zero(static_cast<Index>(types.size()), static_cast<Index>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) e(idx[k], static_cast<Index>(k)) = 1.0;
    return e;
}

}  // namespace

TypedInstance typed_instance(Rng& rng, int q, const Counts& counts, int first_step) {
    TypedInstance inst;
    inst.counts = counts;
    for (int t = 0; t < 8; ++t)
        for (int k = 0; k < counts[static_cast<size_t>(t)]; ++k) inst.row_types.push_back(canonkit::kAllTypes[static_cast<size_t>(t)]);
    if (static_cast<int>(inst.row_types.size()) != q) throw std::runtime_error("typed_instance: counts do not sum to q");
    inst.O = random_orthogonal(rng, q).transpose();
    const Matrix& O = inst.O;
    Matrix e_not_r = selector(inst.row_types, [](VectorType t) { return !canonkit::in_right_null(t); });
    Matrix e_not_l = selector(inst.row_types, [](VectorType t) { return !canonkit::in_left_null(t); });
    Matrix e_alpha = selector(inst.row_types, [](VectorType t) { return !canonkit::in_hessian_null(t); });
    Matrix c1 = random_matrix(rng, q, e_not_r.cols()) * e_not_r.transpose() * O;
    Matrix c2 = O.transpose() * e_not_l * random_matrix(rng, e_not_l.cols(), q);
    Matrix h = O.transpose() * e_alpha * well_conditioned_symmetric(rng, e_alpha.cols()) * e_alpha.transpose() * O;
    h = 0.5 * (h + h.transpose());
    Matrix b1 = random_symmetric(rng, q);
    inst.m1 = {first_step, first_step + 1, well_conditioned_symmetric(rng, q), b1, c1};
    inst.m2 = {first_step + 1, first_step + 2, h - b1, well_conditioned_symmetric(rng, q), c2};
    return inst;
}

EquivalenceResult classical_equivalence(Rng& rng, const TypedInstance& inst) {
    using namespace canonkit;
    const auto& m1 = inst.m1;
    const auto& m2 = inst.m2;
    const Index q = m1.dim();
    const int s0 = m1.step_from, s1 = m1.step_to, s2 = m2.step_to;
    auto b0 = classify_step(s0, Matrix(), m1.c, m1.a);
    auto b1 = classify_step(s1, m1.c, m2.c, m1.b + m2.a);
    auto b2 = classify_step(s2, m2.c, Matrix(), m2.b);
    EffectiveMove eff = compose(m1, m2, b1);

    // boundary data on the solution set of the induced configuration constraints
    Matrix cons = Matrix::Zero(static_cast<Index>(eff.multipliers.size()), 2 * q);
    for (size_t k = 0; k < eff.multipliers.size(); ++k) {
        const auto& c = eff.multipliers[k].induced;
        if (c.kind == ConstraintKind::boundary_data) {
            cons.row(k).head(q) = c.x_coeffs.transpose();
            cons.row(k).tail(q) = c.x_coeffs_other.transpose();
        } else if (c.step == s0) {
            cons.row(k).head(q) = c.x_coeffs.transpose();
        } else {
            cons.row(k).tail(q) = c.x_coeffs.transpose();
        }
    }
    Subspace allowed = cons.rows() ? right_null_basis(cons, 1e-9) : Subspace::full(2 * q);
    Vector x02 = allowed.basis * random_vector(rng, allowed.dim());
    Vector x0 = x02.head(q), x2 = x02.tail(q);

    auto nu = b1.rows_where(in_hessian_null);
    Vector mult = random_vector(rng, static_cast<Index>(nu.size()));
    Vector x1 = boundary_solve(m1, m2, b1, x0, x2, mult, 1e-9).x;
    Vector X1 = b1.T.transpose().fullPivLu().solve(x1);
    Vector X2 = b2.T.transpose().fullPivLu().solve(x2);

    auto pick = [](const Vector& v, const std::vector<Index>& idx) {
        Vector out(static_cast<Index>(idx.size()));
        for (size_t k = 0; k < idx.size(); ++k) out(static_cast<Index>(k)) = v(idx[k]);
        return out;
    };
    SolveOptions opt;
    opt.tol = 1e-9;
    Vector p0 = -m1.a * x0 - m1.c * x1;
    auto step1 = forward_solve(m1, b0, b1, {s0, x0, p0, MomentumSide::pre}, pick(X1, b1.right_null_rows()), opt);
    CanonicalData matched = step1.data;
    matched.side = MomentumSide::pre;
    auto step2 = forward_solve(m2, b1, b2, matched, pick(X2, b2.right_null_rows()), opt);

    Vector mvals(static_cast<Index>(eff.multipliers.size()));
    for (size_t k = 0; k < eff.multipliers.size(); ++k)
        mvals(static_cast<Index>(k)) = X1(eff.multipliers[k].induced.source_row);

    EquivalenceResult r;
    r.scale = 1.0 + p0.cwiseAbs().maxCoeff() + step2.data.p.cwiseAbs().maxCoeff();
    r.pre_residual = (effective_pre_momentum(eff, x0, x2, mvals) - p0).cwiseAbs().maxCoeff();
    r.post_residual = (effective_post_momentum(eff, x0, x2, mvals) - step2.data.p).cwiseAbs().maxCoeff();
    r.middle_residual = std::max((step1.data.x - x1).cwiseAbs().maxCoeff(), (step2.data.x - x2).cwiseAbs().maxCoeff());
    return r;
}

Matrix paper_basis_step2_rows() {
    Matrix t = Matrix::Zero(12, 12);
    // differences of the neighbours of the new corners
    t(0, 11) = 1; t(0, 4) = -1;
    t(1, 10) = 1; t(1, 9) = -1;
    t(2, 8) = 1; t(2, 7) = -1;
    t(3, 6) = 1; t(3, 5) = -1;
    // the corners
    t(4, 0) = 1; t(5, 1) = 1; t(6, 2) = 1; t(7, 3) = 1;
    // propagating vertices
    t(8, 8) = 1; t(9, 6) = 1; t(10, 10) = 1; t(11, 11) = 1;
    return t;
}

void jacobi_eigen(const Matrix& sym, Vector& evals, Matrix& V) {
    const Index n = sym.rows();
    Matrix a = 0.5 * (sym + sym.transpose());
    V = Matrix::Identity(n, n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Index p = 0; p < n; ++p)
            for (Index r = p + 1; r < n; ++r) off += a(p, r) * a(p, r);
        if (off < 1e-30) break;
        for (Index p = 0; p < n; ++p)
            for (Index r = p + 1; r < n; ++r) {
                if (std::abs(a(p, r)) < 1e-300) continue;
                double theta = (a(r, r) - a(p, p)) / (2.0 * a(p, r));
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (Index k = 0; k < n; ++k) {
                    double akp = a(k, p), akr = a(k, r);
                    a(k, p) = c * akp - s * akr;
                    a(k, r) = s * akp + c * akr;
                }
                for (Index k = 0; k < n; ++k) {
                    double apk = a(p, k), ark = a(r, k);
                    a(p, k) = c * apk - s * ark;
                    a(r, k) = s * apk + c * ark;
                }
                for (Index k = 0; k < n; ++k) {
                    double vkp = V(k, p), vkr = V(k, r);
                    V(k, p) = c * vkp - s * vkr;
                    V(k, r) = s * vkp + c * vkr;
                }
            }
    }
    evals = a.diagonal();
}

Complex fresnel_quadrature(double lambda, double q, double hbar) {
    const int levels = 6;
    // the damping expansion parameter scales like eps (1 + q^2 / (lambda hbar)) / lambda
    const double eps0 = 0.02 * std::abs(lambda) / hbar / (1.0 + q * q / (std::abs(lambda) * hbar));
    std::vector<double> xs;
    std::vector<Complex> ys;
    for (int k = 0; k < levels; ++k) {
        const double eps = eps0 / std::pow(2.0, k);
        const double Y = std::sqrt(40.0 / eps);
        const double omega = (std::abs(lambda) * Y + std::abs(q)) / hbar;
        const double h0 = std::numbers::pi / (2.0 * omega);
        const long n = static_cast<long>(std::ceil(2.0 * Y / h0));
        const double h = 2.0 * Y / static_cast<double>(n);
        Complex acc(0.0, 0.0);
        for (long i = 0; i <= n; ++i) {
            double y = -Y + h * static_cast<double>(i);
            double w = (i == 0 || i == n) ? 0.5 : 1.0;
            acc += w * std::exp(Complex(-eps * y * y, (0.5 * lambda * y * y + q * y) / hbar));
        }
        xs.push_back(eps);
        ys.push_back(acc * h);
    }
    // Neville extrapolation to eps = 0
    std::vector<Complex> p = ys;
    for (int m = 1; m < levels; ++m)
        for (int i = 0; i < levels - m; ++i)
            p[static_cast<size_t>(i)] = ((0.0 - xs[static_cast<size_t>(i + m)]) * p[static_cast<size_t>(i)] -
                                         (0.0 - xs[static_cast<size_t>(i)]) * p[static_cast<size_t>(i + 1)]) /
                                        (xs[static_cast<size_t>(i)] - xs[static_cast<size_t>(i + m)]);
    return p[0];
}

Complex gaussian_quadrature(const Matrix& h, const Vector& j, double hbar) {
    Vector ev;
    Matrix V;
    jacobi_eigen(h, ev, V);
    Vector qv = V.transpose() * j;
    Complex acc(1.0, 0.0);
    for (Index k = 0; k < ev.size(); ++k) acc *= fresnel_quadrature(ev(k), qv(k), hbar);
    return acc;
}

Complex smeared_delta(double kappa, double hbar, double sigma, int n) {
    const double k = std::abs(kappa);
    const double tmax = 9.0 * sigma;
    const double xmax = 10.0 * hbar / (sigma * k);
    auto inner = [&](double X) {
        return simpson([&](double t) { return std::exp(Complex(-t * t / (2 * sigma * sigma), X * k * t / hbar)); },
                       -tmax, tmax, n);
    };
    return simpson(inner, -xmax, xmax, n);
}

Complex composed_by_quadrature(const canonkit::GaussianDeltaKernel& k1, const canonkit::GaussianDeltaKernel& k2,
                               const Vector& x0, const Vector& x2) {
    const double hbar = k1.hbar;
    Matrix h = k1.B + k2.A;
    Vector j = k1.C.transpose() * x0 + k2.C * x2;
    double outer = 0.5 * x0.dot(k1.A * x0) + 0.5 * x2.dot(k2.B * x2);
    return k1.amplitude.value() * k2.amplitude.value() * std::exp(Complex(0.0, outer / hbar)) *
           gaussian_quadrature(h, j, hbar);
}

}  // namespace testsupport
