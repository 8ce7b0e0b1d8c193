///
/// \file sampling.hpp
///
/// Seeded random instances: points of the model domains, Haar-ish unitaries,
/// colligations and Herglotz representations.
///

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "schur_agler/domains.hpp"
#include "schur_agler/herglotz.hpp"
#include "schur_agler/numerics.hpp"
#include "schur_agler/realization.hpp"

namespace schur_agler::sampling {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Complex gaussian(Rng& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    const double re = n(rng);
    return {re, n(rng)};
}

/// Uniform in the disc of the given radius.
inline Complex disc_point(Rng& rng, double radius = 0.95)
{
    const double r = radius * std::sqrt(uniform(rng));
    return std::polar(r, uniform(rng, 0.0, 2.0 * std::numbers::pi));
}

/// Uniform in the ball of the given radius in C^m.
inline CVector ball_point(Rng& rng, int m, double radius = 0.95)
{
    CVector v(m);
    for (int i = 0; i < m; ++i)
    {
        v[i] = gaussian(rng);
    }
    const double r = radius * std::pow(uniform(rng), 1.0 / (2.0 * m));
    return r * v.normalized();
}

inline CVector gaussian_vector(Rng& rng, Index n)
{
    CVector v(n);
    for (Index i = 0; i < n; ++i)
    {
        v[i] = gaussian(rng);
    }
    return v;
}

inline CMatrix gaussian_matrix(Rng& rng, Index rows, Index cols)
{
    CMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
    {
        for (Index j = 0; j < cols; ++j)
        {
            m(i, j) = gaussian(rng);
        }
    }
    return m;
}

/// Q from the QR factorization of a Gaussian matrix, with R's diagonal phases
/// folded in so the distribution is Haar.
inline CMatrix unitary(Rng& rng, Index n)
{
    if (n == 0)
    {
        return CMatrix(0, 0);
    }
    const CMatrix g = gaussian_matrix(rng, n, n);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q       = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index k = 0; k < n; ++k)
    {
        const Complex d = r(k, k);
        if (std::abs(d) > 0.0)
        {
            q.col(k) *= d / std::abs(d);
        }
    }
    return q;
}

inline CMatrix hermitian(Rng& rng, Index n)
{
    const CMatrix g = gaussian_matrix(rng, n, n);
    return 0.5 * (g + g.adjoint());
}

/// Random PSD matrix of the given rank.
inline CMatrix psd(Rng& rng, Index n, Index rank)
{
    const CMatrix g = gaussian_matrix(rng, n, rank);
    return g * g.adjoint();
}

inline DomainPoint point(Rng& rng, const Domain& d, double radius = 0.95)
{
    switch (d.kind)
    {
    case DomainKind::disc:
        return DomainPoint::disc(disc_point(rng, radius));
    case DomainKind::polydisc: {
        CVector z(d.dim);
        for (int j = 0; j < d.dim; ++j)
        {
            z[j] = disc_point(rng, radius);
        }
        return DomainPoint(d, z);
    }
    case DomainKind::symmetrized_bidisc: {
        const Complex a = disc_point(rng, radius);
        const Complex b = disc_point(rng, radius);
        return DomainPoint(d, CVector{{a + b, a * b}});
    }
    case DomainKind::ball:
        return DomainPoint(d, ball_point(rng, d.dim, radius));
    }
    throw InputError("sampling: unsupported domain");
}

inline Colligation colligation(Rng& rng, std::vector<Index> block_dims)
{
    const Index n = std::accumulate(block_dims.begin(), block_dims.end(), Index{0});
    return Colligation::from_unitary(unitary(rng, n + 1), std::move(block_dims));
}

/// Single-block representation on the disc with basepoint 0.
inline HerglotzData herglotz(Rng& rng, Index dim)
{
    HerglotzData h;
    h.b          = uniform(rng, -2.0, 2.0);
    h.U          = unitary(rng, dim);
    h.gamma      = gaussian_vector(rng, dim);
    h.block_dims = {dim};
    return h;
}

} // namespace schur_agler::sampling
