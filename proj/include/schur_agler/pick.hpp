///
/// \file pick.hpp
///
/// Finite interpolation data, Pick matrices, and Agler decompositions
///
///   1 - w_i conj(w_j) = sum_l (1 - psi_l(z_i) conj(psi_l(z_j))) Gamma_l(i, j)
///
/// with PSD blocks Gamma_l, found by alternating projections.
///

#pragma once

#include <span>
#include <vector>

#include "schur_agler/domains.hpp"
#include "schur_agler/kernels.hpp"
#include "schur_agler/numerics.hpp"

namespace schur_agler {

struct PickData
{
    Domain domain;
    std::vector<DomainPoint> nodes;
    std::vector<Complex> targets;

    PickData(Domain d, std::vector<DomainPoint> z, std::vector<Complex> w)
        : domain(d), nodes(std::move(z)), targets(std::move(w))
    {
        if (nodes.size() != targets.size())
        {
            throw InputError("PickData: node and target counts differ");
        }
        for (std::size_t i = 0; i < nodes.size(); ++i)
        {
            if (!(nodes[i].domain() == domain))
            {
                throw InputError("PickData: node " + std::to_string(i) +
                                 " does not lie in " + domain.tag());
            }
            if (!(std::abs(targets[i]) <= 1.0))
            {
                throw InputError("PickData: target " + std::to_string(i) +
                                 " has modulus greater than 1");
            }
            for (std::size_t j = 0; j < i; ++j)
            {
                if (nodes[i] == nodes[j])
                {
                    throw InputError("PickData: nodes " + std::to_string(j) + " and " +
                                     std::to_string(i) + " coincide");
                }
            }
        }
    }

    std::size_t size() const noexcept { return nodes.size(); }
};

/// Entries (1 - w_i conj(w_j)) k(z_i, z_j).
inline HermitianMatrix pick_matrix(const PickData& data, KernelKind kind)
{
    const auto k  = kernel_matrix(kind, data.nodes);
    const Index n = static_cast<Index>(data.size());
    CVector w(n);
    for (Index i = 0; i < n; ++i)
    {
        w[i] = data.targets[static_cast<std::size_t>(i)];
    }
    const CMatrix weight = CMatrix::Ones(n, n) - w * w.adjoint();
    return HermitianMatrix(weight.cwiseProduct(k.values.matrix()));
}

/// Classical Pick criterion on the disc.
inline PsdVerdict disc_solvable(const PickData& data, double tol = default_psd_tol)
{
    if (data.domain.kind != DomainKind::disc)
    {
        throw InputError("disc_solvable: data must live on the disc");
    }
    return is_psd(pick_matrix(data, KernelKind::szego), tol);
}

/// Test family used for Agler decompositions on a domain: the identity on
/// the disc and the coordinate functions on a polydisc.
inline std::vector<TestFunction> agler_family(const Domain& d)
{
    if (d.kind == DomainKind::disc || d.kind == DomainKind::polydisc)
    {
        return TestFamily::full(d).members();
    }
    throw InputError("no finite Agler family on " + d.tag() + "; pass one explicitly");
}

struct AglerCertificate
{
    std::vector<HermitianMatrix> gammas; // one n x n block per test function
};

struct AglerOptions
{
    int budget = 20000;
    double tol = 1e-8;
};

struct AglerResult
{
    FeasibilityResult feasibility;
    AglerCertificate certificate;

    bool ok() const noexcept { return feasibility.ok(); }
};

namespace detail {

/// Rows: psi_l(z_i) for every node i and family member l.
inline CMatrix family_values(const PickData& data, std::span<const TestFunction> family)
{
    CMatrix vals(static_cast<Index>(data.size()), static_cast<Index>(family.size()));
    for (std::size_t i = 0; i < data.size(); ++i)
    {
        for (std::size_t l = 0; l < family.size(); ++l)
        {
            vals(static_cast<Index>(i), static_cast<Index>(l)) = family[l](data.nodes[i]);
        }
    }
    return vals;
}

} // namespace detail

inline HermitianAffineSystem agler_system(const PickData& data,
                                          std::span<const TestFunction> family)
{
    if (family.empty())
    {
        throw InputError("agler_system: empty test family");
    }
    const Index n     = static_cast<Index>(data.size());
    const CMatrix psi = detail::family_values(data, family);
    HermitianAffineSystem sys(std::vector<Index>(family.size(), n));

    std::vector<HermitianAffineSystem::Term> terms;
    for (Index i = 0; i < n; ++i)
    {
        for (Index j = i; j < n; ++j)
        {
            terms.clear();
            for (std::size_t l = 0; l < family.size(); ++l)
            {
                const Index li = static_cast<Index>(l);
                terms.push_back({l, i, j, 1.0 - psi(i, li) * std::conj(psi(j, li))});
            }
            const Complex rhs = 1.0 - data.targets[static_cast<std::size_t>(i)] *
                                          std::conj(data.targets[static_cast<std::size_t>(j)]);
            if (i == j)
            {
                sys.add_real(terms, rhs.real());
            }
            else
            {
                sys.add_complex(terms, rhs);
            }
        }
    }
    return sys;
}

inline AglerResult agler_decompose(const PickData& data,
                                   std::span<const TestFunction> family,
                                   const AglerOptions& opt = {})
{
    for (std::size_t i = 0; i < data.size(); ++i)
    {
        if (!(std::abs(data.targets[i]) < 1.0))
        {
            throw InputError("agler_decompose: target " + std::to_string(i) +
                             " must lie in the open unit disc");
        }
    }
    const auto sys = agler_system(data, family);
    DykstraOptions dopt;
    dopt.budget = opt.budget;
    dopt.tol    = opt.tol;
    AglerResult out;
    out.feasibility          = dykstra_feasible(sys, dopt);
    out.certificate.gammas   = out.feasibility.solution;
    return out;
}

inline AglerResult agler_decompose(const PickData& data, const AglerOptions& opt = {})
{
    const auto family = agler_family(data.domain);
    return agler_decompose(data, family, opt);
}

/// Max entrywise violation of the Agler identity plus the largest PSD
/// violation (negated minimum eigenvalue) over the blocks.
inline double certificate_residual(const PickData& data, const AglerCertificate& cert,
                                   std::span<const TestFunction> family)
{
    if (cert.gammas.size() != family.size())
    {
        throw InputError("certificate_residual: one block per test function expected");
    }
    const Index n = static_cast<Index>(data.size());
    for (const auto& g : cert.gammas)
    {
        if (g.dim() != n)
        {
            throw InputError("certificate_residual: block dimension does not match node count");
        }
    }
    if (n == 0)
    {
        return 0.0;
    }
    const CMatrix psi = detail::family_values(data, family);
    double affine     = 0.0;
    for (Index i = 0; i < n; ++i)
    {
        for (Index j = 0; j < n; ++j)
        {
            Complex sum = 0.0;
            for (std::size_t l = 0; l < family.size(); ++l)
            {
                const Index li = static_cast<Index>(l);
                sum += (1.0 - psi(i, li) * std::conj(psi(j, li))) * cert.gammas[l](i, j);
            }
            const Complex rhs = 1.0 - data.targets[static_cast<std::size_t>(i)] *
                                          std::conj(data.targets[static_cast<std::size_t>(j)]);
            affine = std::max(affine, std::abs(sum - rhs));
        }
    }
    return affine + detail::cone_violation(cert.gammas);
}

inline double certificate_residual(const PickData& data, const AglerCertificate& cert)
{
    const auto family = agler_family(data.domain);
    return certificate_residual(data, cert, family);
}

/// Two-node data z1 -> 0, z2 -> c*(z1, z2).
inline PickData extremal_pick_data(const Domain& d, const DomainPoint& z1,
                                   const DomainPoint& z2, const SymBidiscSearch& search = {})
{
    if (z1 == z2)
    {
        throw InputError("extremal_pick_data: points coincide");
    }
    const double c = caratheodory_distance(d, z1, z2, search).value;
    return PickData(d, {z1, z2}, {Complex(0.0), Complex(c)});
}

} // namespace schur_agler
