///
/// \file realization.hpp
///
/// Transfer-function realizations f(z) = a + B Delta(z) (I - D Delta(z))^{-1} C
/// of Schur-Agler functions on finite data, where Delta(z) is block diagonal
/// with psi_l(z) repeated over the l-th block of the state space.
///

#pragma once

#include <numeric>
#include <span>
#include <vector>

#include "schur_agler/domains.hpp"
#include "schur_agler/numerics.hpp"
#include "schur_agler/pick.hpp"

namespace schur_agler {

/// Scalar values repeated over blocks of the given sizes.
struct BlockDiagonal
{
    CVector values;
    std::vector<Index> block_dims;

    Index dim() const
    {
        return std::accumulate(block_dims.begin(), block_dims.end(), Index{0});
    }

    CVector expanded() const
    {
        if (values.size() != static_cast<Index>(block_dims.size()))
        {
            throw InputError("BlockDiagonal: one value per block expected");
        }
        CVector diag(dim());
        Index at = 0;
        for (std::size_t b = 0; b < block_dims.size(); ++b)
        {
            diag.segment(at, block_dims[b]).setConstant(values[static_cast<Index>(b)]);
            at += block_dims[b];
        }
        return diag;
    }

    double sup_norm() const { return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff(); }

    BlockDiagonal conjugate() const { return {values.conjugate(), block_dims}; }
};

/// [[a, B], [C, D]] acting on C (+) X with X split into blocks.
struct Colligation
{
    Complex a = 0.0;
    CMatrix B; // 1 x N
    CVector C; // N
    CMatrix D; // N x N
    std::vector<Index> block_dims;

    static Colligation from_unitary(const CMatrix& v, std::vector<Index> dims)
    {
        const Index n = std::accumulate(dims.begin(), dims.end(), Index{0});
        if (v.rows() != n + 1 || v.cols() != n + 1)
        {
            throw InputError("Colligation: matrix size does not match block dimensions");
        }
        Colligation c;
        c.a          = v(0, 0);
        c.B          = v.block(0, 1, 1, n);
        c.C          = v.block(1, 0, n, 1);
        c.D          = v.block(1, 1, n, n);
        c.block_dims = std::move(dims);
        return c;
    }

    Index state_dim() const { return D.rows(); }

    CMatrix assembled() const
    {
        const Index n = state_dim();
        CMatrix v(n + 1, n + 1);
        v(0, 0)              = a;
        v.block(0, 1, 1, n) = B;
        v.block(1, 0, n, 1) = C;
        v.block(1, 1, n, n) = D;
        return v;
    }

    double unitarity_defect() const { return schur_agler::unitarity_defect(assembled()); }
};

inline constexpr double resolvent_condition_limit = 1e12;

inline Complex transfer_eval(const Colligation& col, const BlockDiagonal& e)
{
    if (e.block_dims != col.block_dims)
    {
        throw InputError("transfer_eval: block structure does not match the colligation");
    }
    const Index n = col.state_dim();
    if (n == 0)
    {
        return col.a;
    }
    const CVector delta = e.expanded();
    const CMatrix m     = CMatrix::Identity(n, n) - col.D * delta.asDiagonal();
    Eigen::PartialPivLU<CMatrix> lu(m);
    if (!(lu.rcond() * resolvent_condition_limit > 1.0))
    {
        throw NumericalError("transfer_eval: I - D Delta(z) is numerically singular");
    }
    const CVector x = lu.solve(col.C);
    return col.a + (col.B * delta.asDiagonal() * x)(0, 0);
}

inline BlockDiagonal family_block(std::span<const TestFunction> family, const DomainPoint& z,
                                  const std::vector<Index>& block_dims)
{
    if (family.size() != block_dims.size())
    {
        throw InputError("family size does not match the number of state blocks");
    }
    return {e_vector(family, z), block_dims};
}

/// Lurking isometry: with Gram factors <h_i^l, h_j^l> = Gamma_l(i, j), the
/// Agler identity says the families u_i = (1, psi_l(z_i) h_i^l) and
/// v_i = (w_i, h_i^l) have the same Gram matrix, so u_i -> v_i extends to a
/// unitary V. Reading V as [[a, B], [C, D]] gives h = (I - D Delta)^{-1} C
/// and w = a + B Delta h, i.e. the colligation interpolates the data.
inline Colligation lurking_isometry(const PickData& data, const AglerCertificate& cert,
                                    std::span<const TestFunction> family,
                                    double certificate_tol = 1e-6,
                                    double gram_tol        = default_gram_tol)
{
    const double res = certificate_residual(data, cert, family);
    if (res > certificate_tol)
    {
        throw InputError("lurking_isometry: certificate residual " + std::to_string(res) +
                         " exceeds tolerance");
    }
    const Index n = static_cast<Index>(data.size());

    std::vector<GramFactor> factors;
    std::vector<Index> dims;
    for (const auto& g : cert.gammas)
    {
        // gram_factor gives <g_j, g_i> = M(i, j); transposing yields <h_i, h_j> = Gamma(i, j).
        factors.push_back(gram_factor(HermitianMatrix(g.matrix().transpose())));
        dims.push_back(factors.back().rank);
    }
    const Index state = std::accumulate(dims.begin(), dims.end(), Index{0});

    CMatrix sources(state + 1, n);
    CMatrix targets(state + 1, n);
    for (Index i = 0; i < n; ++i)
    {
        const auto& z = data.nodes[static_cast<std::size_t>(i)];
        sources(0, i) = 1.0;
        targets(0, i) = data.targets[static_cast<std::size_t>(i)];
        Index at      = 1;
        for (std::size_t l = 0; l < factors.size(); ++l)
        {
            const Index r   = dims[l];
            const CVector h = factors[l].column(i);
            sources.block(at, i, r, 1) = family[l](z) * h;
            targets.block(at, i, r, 1) = h;
            at += r;
        }
    }
    return Colligation::from_unitary(unitary_completion(sources, targets, gram_tol), dims);
}

inline Colligation lurking_isometry(const PickData& data, const AglerCertificate& cert)
{
    const auto family = agler_family(data.domain);
    return lurking_isometry(data, cert, family);
}

/// Max over nodes of |transfer function - target|.
inline double realization_check(const Colligation& col, const PickData& data,
                                std::span<const TestFunction> family)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
    {
        const auto e = family_block(family, data.nodes[i], col.block_dims);
        worst        = std::max(worst, std::abs(transfer_eval(col, e) - data.targets[i]));
    }
    return worst;
}

inline double realization_check(const Colligation& col, const PickData& data)
{
    const auto family = agler_family(data.domain);
    return realization_check(col, data, family);
}

} // namespace schur_agler
