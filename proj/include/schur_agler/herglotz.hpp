///
/// \file herglotz.hpp
///
/// Operator Herglotz representations
///
///   h(z) = i b + < gamma, (I + U Delta*) (I - U Delta*)^{-1} gamma >
///
/// with U unitary and Delta* = rho(E(z)*) block diagonal, plus a constructive
/// fit on the disc that recovers (b, U, gamma) from samples of h.
///

#pragma once

#include <span>
#include <vector>

#include "schur_agler/numerics.hpp"
#include "schur_agler/realization.hpp"

namespace schur_agler {

struct CayleyValue
{
    Complex value;
    bool on_boundary; // |value| == 1 within 1e-12, i.e. Re h == 0
};

/// s = (h - 1) / (h + 1) for Re h >= 0.
inline CayleyValue cayley(Complex h)
{
    if (h == Complex(-1.0, 0.0))
    {
        throw InputError("cayley: h = -1 has no Cayley transform");
    }
    if (h.real() < 0.0)
    {
        throw InputError("cayley: Re h must be nonnegative");
    }
    const Complex s = (h - 1.0) / (h + 1.0);
    return {s, std::abs(std::abs(s) - 1.0) <= 1e-12};
}

/// h = (1 + s) / (1 - s) for |s| < 1.
inline Complex inverse_cayley(Complex s)
{
    if (!(std::abs(s) < 1.0))
    {
        throw InputError("inverse_cayley: s must lie in the open unit disc");
    }
    return (1.0 + s) / (1.0 - s);
}

struct HerglotzData
{
    double b = 0.0;
    CMatrix U;
    CVector gamma;
    std::vector<Index> block_dims;
    Complex basepoint = 0.0; // disc point w0 where the disc test function vanishes

    Index dim() const { return U.rows(); }
};

/// Disc test function vanishing at w0; the identity when w0 = 0.
inline Complex disc_test(Complex w0, Complex z)
{
    return (z - w0) / (1.0 - std::conj(w0) * z);
}

inline Complex herglotz_eval(const HerglotzData& rep, const BlockDiagonal& e_star)
{
    if (e_star.block_dims != rep.block_dims)
    {
        throw InputError("herglotz_eval: block structure does not match the representation");
    }
    const Index n = rep.dim();
    if (rep.U.cols() != n || rep.gamma.size() != n || e_star.dim() != n)
    {
        throw InputError("herglotz_eval: inconsistent dimensions");
    }
    if (n == 0)
    {
        return Complex(0.0, rep.b);
    }
    const CMatrix ud = rep.U * e_star.expanded().asDiagonal();
    const CMatrix id = CMatrix::Identity(n, n);
    Eigen::PartialPivLU<CMatrix> lu(id - ud);
    if (!(lu.rcond() * resolvent_condition_limit > 1.0))
    {
        throw NumericalError("herglotz_eval: I - U Delta* is numerically singular");
    }
    const CVector y = (id + ud) * lu.solve(rep.gamma);
    return Complex(0.0, rep.b) + inner(rep.gamma, y);
}

/// Evaluation on the disc with rho(E(z)*) = conj(psi(z)) I, psi vanishing at
/// the representation's basepoint.
inline Complex herglotz_eval_disc(const HerglotzData& rep, Complex z)
{
    if (!(std::abs(z) < 1.0))
    {
        throw InputError("herglotz_eval_disc: z must lie in the open unit disc");
    }
    const Complex psi = disc_test(rep.basepoint, z);
    return herglotz_eval(rep, {CVector::Constant(static_cast<Index>(rep.block_dims.size()),
                                                 std::conj(psi)),
                               rep.block_dims});
}

struct HerglotzFitTrace
{
    CMatrix g_vectors; // columns g_i
    CMatrix k_vectors; // columns k_i = (conj(h_i) + 1) g_i
    CMatrix V;
    Complex a_entry = 0.0;
    CVector beta;
    CMatrix D_block;
    double values_of_k_defect = 0.0; // max_i |k_i - 2 (I - U conj(psi_i))^{-1} gamma|
    double scale              = 0.0; // Re h(w0)
};

struct HerglotzFit
{
    HerglotzData data;
    HerglotzFitTrace trace;
};

struct HerglotzFitOptions
{
    double psd_tol  = default_psd_tol;
    double rank_tol = default_rank_tol;
    double gram_tol = default_gram_tol;
};

/// Builds a representation from samples (z_i, h(z_i)) on the disc:
///  1. normalize to g = (h - i b) / a with a + i b = h(w0), so g(w0) = 1;
///  2. Cayley transform s = (g - 1) / (g + 1) and Gram-factor the Pick-type
///     matrix (1 - s_i conj(s_j)) / (1 - psi_i conj(psi_j)) into vectors g_i;
///  3. with k_i = (conj(g(z_i)) + 1) g_i the pairs
///     (conj(g)+1, conj(psi) k) -> (conj(g)-1, k) preserve inner products;
///     extend to a unitary V = [[a, B], [C, D]];
///  4. a vanishes, gamma = C, beta = B*, U = gamma beta* + D is unitary and
///     k_i = 2 (I - U conj(psi_i))^{-1} gamma;
///  5. rescale gamma by sqrt(a) and restore b.
/// If Re h(w0) = 0 the samples must be a purely imaginary constant and the
/// zero-dimensional representation is returned.
inline HerglotzFit herglotz_fit(std::span<const Complex> points, std::span<const Complex> values,
                                std::size_t w0_index, const HerglotzFitOptions& opt = {})
{
    const std::size_t n = points.size();
    if (n == 0 || values.size() != n)
    {
        throw InputError("herglotz_fit: need matching, nonempty point and value lists");
    }
    if (w0_index >= n)
    {
        throw InputError("herglotz_fit: basepoint index out of range");
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        if (!(std::abs(points[i]) < 1.0))
        {
            throw InputError("herglotz_fit: sample point " + std::to_string(i) +
                             " is outside the disc");
        }
        for (std::size_t j = 0; j < i; ++j)
        {
            if (points[i] == points[j])
            {
                throw InputError("herglotz_fit: repeated sample point");
            }
        }
    }

    const Complex w0 = points[w0_index];
    const Complex h0 = values[w0_index];
    const double a   = h0.real();
    const double b   = h0.imag();

    HerglotzFit fit;
    fit.data.b         = b;
    fit.data.basepoint = w0;
    fit.trace.scale    = a;

    if (a < -1e-12 * std::max(1.0, std::abs(h0)))
    {
        throw InputError("herglotz_fit: Re h(w0) is negative");
    }
    if (a <= 1e-12 * std::max(1.0, std::abs(h0)))
    {
        // Nonnegative real part vanishing at an interior point forces a constant.
        for (std::size_t i = 0; i < n; ++i)
        {
            if (std::abs(values[i] - Complex(0.0, b)) > 1e-9 * std::max(1.0, std::abs(values[i])))
            {
                throw InputError("herglotz_fit: Re h(w0) = 0 but the samples are not constant");
            }
        }
        fit.data.U          = CMatrix(0, 0);
        fit.data.gamma      = CVector(0);
        fit.data.block_dims = {0};
        return fit;
    }

    const Index m = static_cast<Index>(n);
    CVector g(m), s(m), psi(m);
    for (Index i = 0; i < m; ++i)
    {
        g[i]   = (values[static_cast<std::size_t>(i)] - Complex(0.0, b)) / a;
        s[i]   = cayley(g[i]).value;
        psi[i] = disc_test(w0, points[static_cast<std::size_t>(i)]);
    }

    CMatrix pick(m, m);
    for (Index i = 0; i < m; ++i)
    {
        for (Index j = 0; j < m; ++j)
        {
            pick(i, j) = (1.0 - s[i] * std::conj(s[j])) / (1.0 - psi[i] * std::conj(psi[j]));
        }
    }
    const HermitianMatrix pick_h(pick);
    const auto verdict = is_psd(pick_h, opt.psd_tol);
    if (!verdict.is_psd)
    {
        throw InputError("herglotz_fit: samples are not values of a function with "
                         "nonnegative real part (Pick-type matrix has eigenvalue " +
                         std::to_string(verdict.min_eigenvalue) + ")");
    }
    const auto factor = gram_factor(pick_h, opt.rank_tol, opt.psd_tol);
    const Index r     = factor.rank;

    CMatrix k(r, m);
    CMatrix sources(r + 1, m);
    CMatrix targets(r + 1, m);
    for (Index i = 0; i < m; ++i)
    {
        const Complex gb = std::conj(g[i]);
        k.col(i)         = (gb + 1.0) * factor.column(i);
        sources(0, i)    = gb + 1.0;
        targets(0, i)    = gb - 1.0;
        sources.block(1, i, r, 1) = std::conj(psi[i]) * k.col(i);
        targets.block(1, i, r, 1) = k.col(i);
    }
    const CMatrix v = unitary_completion(sources, targets, opt.gram_tol);

    fit.trace.g_vectors = factor.columns;
    fit.trace.k_vectors = k;
    fit.trace.V         = v;
    fit.trace.a_entry   = v(0, 0);
    fit.trace.beta      = v.block(0, 1, 1, r).adjoint();
    fit.trace.D_block   = v.block(1, 1, r, r);
    const CVector gamma = v.block(1, 0, r, 1);
    const CMatrix u     = gamma * fit.trace.beta.adjoint() + fit.trace.D_block;

    double defect = 0.0;
    for (Index i = 0; i < m; ++i)
    {
        const CMatrix lhs = CMatrix::Identity(r, r) - std::conj(psi[i]) * u;
        const CVector ki  = 2.0 * lhs.partialPivLu().solve(gamma);
        defect            = std::max(defect, (k.col(i) - ki).norm());
    }
    fit.trace.values_of_k_defect = defect;

    fit.data.U          = u;
    fit.data.gamma      = std::sqrt(a) * gamma;
    fit.data.block_dims = {r};
    return fit;
}

} // namespace schur_agler
