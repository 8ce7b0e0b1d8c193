///
/// \file kernels.hpp
///
/// Reproducing kernels on the model domains, admissibility of a kernel with
/// respect to a test family, and the distance bound
/// sqrt(1 - |k(z,w)|^2 / (k(z,z) k(w,w))) that admissible kernels place on
/// every Schur-Agler function.
///

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "schur_agler/domains.hpp"
#include "schur_agler/numerics.hpp"

namespace schur_agler {

enum class KernelKind
{
    szego,            // 1 / (1 - z conj(w)) on the disc
    drury_arveson,    // 1 / (1 - <z, w>) on the ball
    polydisc_product, // prod_j 1 / (1 - z_j conj(w_j)) on the polydisc
};

inline const char* to_string(KernelKind k)
{
    switch (k)
    {
    case KernelKind::szego:
        return "szego";
    case KernelKind::drury_arveson:
        return "drury_arveson";
    case KernelKind::polydisc_product:
        return "polydisc_product";
    }
    return "?";
}

inline KernelKind kernel_kind_from_string(const std::string& s)
{
    if (s == "szego")
        return KernelKind::szego;
    if (s == "drury_arveson")
        return KernelKind::drury_arveson;
    if (s == "polydisc_product")
        return KernelKind::polydisc_product;
    throw InputError("unknown kernel kind '" + s + "'");
}

/// The kernel naturally attached to a domain, where one is defined.
inline KernelKind natural_kernel(const Domain& d)
{
    switch (d.kind)
    {
    case DomainKind::disc:
        return KernelKind::szego;
    case DomainKind::polydisc:
        return KernelKind::polydisc_product;
    case DomainKind::ball:
        return KernelKind::drury_arveson;
    case DomainKind::symmetrized_bidisc:
        break;
    }
    throw InputError("no built-in kernel on " + d.tag());
}

inline Complex kernel_eval(KernelKind kind, const DomainPoint& z, const DomainPoint& w)
{
    if (!(z.domain() == w.domain()))
    {
        throw InputError("kernel_eval: points lie in different domains");
    }
    const Domain& d = z.domain();
    switch (kind)
    {
    case KernelKind::szego:
        if (d.kind != DomainKind::disc)
            break;
        return 1.0 / (1.0 - z[0] * std::conj(w[0]));
    case KernelKind::drury_arveson:
        if (d.kind != DomainKind::ball)
            break;
        return 1.0 / (1.0 - inner(z.coords(), w.coords()));
    case KernelKind::polydisc_product: {
        if (d.kind != DomainKind::polydisc && d.kind != DomainKind::disc)
            break;
        Complex out = 1.0;
        for (Index j = 0; j < d.coordinate_count(); ++j)
        {
            out /= 1.0 - z[j] * std::conj(w[j]);
        }
        return out;
    }
    }
    throw InputError(std::string("kernel_eval: ") + to_string(kind) +
                     " kernel is not defined on " + d.tag());
}

struct KernelMatrix
{
    std::vector<DomainPoint> points;
    HermitianMatrix values; // values(i, j) = k(points[i], points[j])
};

inline KernelMatrix kernel_matrix(KernelKind kind, std::vector<DomainPoint> points)
{
    const Index n = static_cast<Index>(points.size());
    CMatrix m(n, n);
    for (Index i = 0; i < n; ++i)
    {
        for (Index j = 0; j < n; ++j)
        {
            m(i, j) = kernel_eval(kind, points[static_cast<std::size_t>(i)],
                                  points[static_cast<std::size_t>(j)]);
        }
    }
    return {std::move(points), HermitianMatrix(m)};
}

struct AdmissibilityReport
{
    bool admissible = true;
    // Empty when the kernel itself fails to be PSD.
    std::optional<TestFunction> worst_test;
    std::size_t worst_index     = 0;
    double worst_min_eigenvalue = 0.0;
};

/// Checks K >= 0 and ((1 - psi(z_i) conj(psi(z_j))) K(i, j)) >= 0 for each psi.
/// The worst member is the one with the smallest minimum eigenvalue; ties
/// keep family order.
inline AdmissibilityReport admissible_check(const KernelMatrix& k,
                                            std::span<const TestFunction> family,
                                            double tol = default_psd_tol)
{
    if (family.empty())
    {
        throw InputError("admissible_check: empty test family");
    }
    AdmissibilityReport report;
    const auto base = is_psd(k.values, tol);
    if (!base.is_psd)
    {
        report.admissible           = false;
        report.worst_min_eigenvalue = base.min_eigenvalue;
        return report;
    }

    const Index n = k.values.dim();
    std::optional<double> worst;
    for (std::size_t f = 0; f < family.size(); ++f)
    {
        CVector vals(n);
        for (Index i = 0; i < n; ++i)
        {
            vals[i] = family[f](k.points[static_cast<std::size_t>(i)]);
        }
        const CMatrix weight = CMatrix::Ones(n, n) - vals * vals.adjoint();
        const auto verdict   = is_psd(HermitianMatrix(weight.cwiseProduct(k.values.matrix())), tol);
        if (!worst || verdict.min_eigenvalue < *worst)
        {
            worst                       = verdict.min_eigenvalue;
            report.worst_test           = family[f];
            report.worst_index          = f;
            report.worst_min_eigenvalue = verdict.min_eigenvalue;
        }
        if (!verdict.is_psd)
        {
            report.admissible = false;
        }
    }
    return report;
}

/// The kernel 1 / (1 - f(x) conj(f(y))) restricted to {z1, z2}; outside these
/// two points it is zero and is never materialized.
inline KernelMatrix two_point_kernel(Complex f1, Complex f2, const DomainPoint& z1,
                                     const DomainPoint& z2)
{
    if (!(std::abs(f1) < 1.0) || !(std::abs(f2) < 1.0))
    {
        throw InputError("two_point_kernel: values must lie in the open unit disc");
    }
    CMatrix m(2, 2);
    m(0, 0) = 1.0 / (1.0 - std::norm(f1));
    m(1, 1) = 1.0 / (1.0 - std::norm(f2));
    m(0, 1) = 1.0 / (1.0 - f1 * std::conj(f2));
    m(1, 0) = std::conj(m(0, 1));
    return {{z1, z2}, HermitianMatrix(m)};
}

inline double kernel_distance_bound(const KernelMatrix& k, Index i, Index j)
{
    const Index n = k.values.dim();
    if (i < 0 || j < 0 || i >= n || j >= n)
    {
        throw InputError("kernel_distance_bound: index out of range");
    }
    const double kii = k.values(i, i).real();
    const double kjj = k.values(j, j).real();
    if (kii == 0.0 || kjj == 0.0)
    {
        throw InputError("kernel_distance_bound: requires k(z1,z1) != 0 != k(z2,z2)");
    }
    const double ratio = std::norm(k.values(i, j)) / (kii * kjj);
    return std::sqrt(std::clamp(1.0 - ratio, 0.0, 1.0));
}

struct Sandwich
{
    double lower = 0.0; // sup over the family of m(psi(z1), psi(z2))
    double upper = 0.0; // bound from the two-point kernel of the best member
    double gap   = 0.0;
    TestFunction witness;
};

inline Sandwich dpsi_sandwich(const TestFamily& family, const DomainPoint& z1,
                              const DomainPoint& z2)
{
    const auto best = family.sup(z1, z2);
    const auto k    = two_point_kernel(best.member(z1), best.member(z2), z1, z2);
    const double upper = kernel_distance_bound(k, 0, 1);
    return {best.value, upper, upper - best.value, best.member};
}

inline Sandwich dpsi_sandwich(const Domain& d, const TestFamily& family,
                              const DomainPoint& z1, const DomainPoint& z2)
{
    if (!(family.domain() == d))
    {
        throw InputError("dpsi_sandwich: family lives on " + family.domain().tag());
    }
    return dpsi_sandwich(family, z1, z2);
}

inline Sandwich dpsi_sandwich(const Domain& d, std::span<const TestFunction> family,
                              const DomainPoint& z1, const DomainPoint& z2)
{
    return dpsi_sandwich(d, TestFamily::finite({family.begin(), family.end()}), z1, z2);
}

} // namespace schur_agler
