///
/// \file da_extremal.hpp
///
/// Extremal contractive multipliers of the Drury-Arveson space for the
/// two-point problem z1 -> 0, z2 -> c*(z1, z2) on the ball, the phase
/// constraint such a multiplier imposes on its value at a third point, and
/// a brute-force grid oracle for that constraint.
///

#pragma once

#include <cmath>
#include <thread>
#include <vector>

#include "schur_agler/domains.hpp"
#include "schur_agler/kernels.hpp"
#include "schur_agler/numerics.hpp"

namespace schur_agler {

/// f(z) = <phi_a(z), u>.
struct ExtremalMultiplier
{
    CVector center;
    CVector direction;

    Complex operator()(const CVector& z) const
    {
        return inner(ball_automorphism(center, z), direction);
    }
};

namespace detail {

inline void require_ball_point(const CVector& z, const char* what)
{
    if (z.size() < 1 || !(z.squaredNorm() < 1.0))
    {
        throw InputError(std::string(what) + " must lie in the open ball");
    }
}

inline void require_same_dim(const CVector& a, const CVector& b)
{
    if (a.size() != b.size())
    {
        throw InputError("ball points have different dimensions");
    }
}

/// ((1 - w_i conj(w_j)) / (1 - <z_i, z_j>)) over three ball points.
inline HermitianMatrix da_pick3(const std::array<CVector, 3>& z, const std::array<Complex, 3>& w)
{
    CMatrix m(3, 3);
    for (int i = 0; i < 3; ++i)
    {
        for (int j = 0; j < 3; ++j)
        {
            m(i, j) = (1.0 - w[i] * std::conj(w[j])) / (1.0 - inner(z[i], z[j]));
        }
    }
    return HermitianMatrix(m);
}

inline Complex unit(Complex z) { return z / std::abs(z); }

} // namespace detail

inline ExtremalMultiplier ball_extremal(const CVector& z1, const CVector& z2)
{
    detail::require_ball_point(z1, "z1");
    detail::require_ball_point(z2, "z2");
    detail::require_same_dim(z1, z2);
    if (z1 == z2)
    {
        throw InputError("ball_extremal: points coincide");
    }
    return {z1, detail::ball_extremal_direction(z1, z2)};
}

/// {w : (1 - cstar conj(w)) / |1 - cstar conj(w)| = eta}, a chord of the disc
/// through 1/cstar's direction, parametrized by w = (1 - t conj(eta)) / cstar.
struct PhaseConstraint
{
    double cstar = 0.0;
    Complex eta  = 1.0;

    Complex segment_point(double t) const { return (1.0 - t * std::conj(eta)) / cstar; }
};

/// eta is the unit phase of (1 - <z1,z2>)(1 - <z2,z3>)(1 - <z3,z1>), the cyclic
/// product of reciprocal kernel values. It is invariant under ball
/// automorphisms and reduces to the phase of 1 - <z2, z3> when z1 = 0.
inline PhaseConstraint predicted_phase(const CVector& z1, const CVector& z2, const CVector& z3)
{
    detail::require_ball_point(z1, "z1");
    detail::require_ball_point(z2, "z2");
    detail::require_ball_point(z3, "z3");
    detail::require_same_dim(z1, z2);
    detail::require_same_dim(z1, z3);
    if (z1 == z2)
    {
        throw InputError("predicted_phase: z1 and z2 coincide");
    }
    const Complex cyc = (1.0 - inner(z1, z2)) * (1.0 - inner(z2, z3)) * (1.0 - inner(z3, z1));
    return {ball_distance(z1, z2), detail::unit(cyc)};
}

/// Phase of 1 - <z2, z3> alone; agrees with predicted_phase when z1 = 0.
inline Complex origin_phase(const CVector& z2, const CVector& z3)
{
    return detail::unit(1.0 - inner(z2, z3));
}

/// |(1 - c* conj(w)) / |1 - c* conj(w)| - eta|
inline double phase_error(const PhaseConstraint& pc, Complex w3)
{
    if (!(std::abs(w3) < 1.0))
    {
        throw InputError("phase_check: w3 must lie in the open unit disc");
    }
    return std::abs(detail::unit(1.0 - pc.cstar * std::conj(w3)) - pc.eta);
}

inline bool phase_check(const PhaseConstraint& pc, Complex w3, double tol)
{
    return phase_error(pc, w3) <= tol;
}

struct ScanOptions
{
    int grid_n            = 200;
    double psd_tol        = 1e-9;
    double boundary_margin = 1e-6;
    unsigned threads      = 1;
};

struct ScanResult
{
    std::vector<Complex> feasible; // row-major grid order
    Complex best               = 0.0; // grid value with the largest minimum eigenvalue
    double best_min_eigenvalue = -std::numeric_limits<double>::infinity();
    int grid_n                 = 0;
};

/// Scans w3 over a grid_n x grid_n grid of [-1, 1]^2 (points with
/// |w| < 1 - margin) and keeps those for which the Drury-Arveson Pick matrix
/// with targets (0, c*, w3) is PSD.
inline ScanResult feasible_w3_scan(const CVector& z1, const CVector& z2, const CVector& z3,
                                   const ScanOptions& opt = {})
{
    const auto pc = predicted_phase(z1, z2, z3);
    if (opt.grid_n < 2)
    {
        throw InputError("feasible_w3_scan: grid_n must be at least 2");
    }
    const int n = opt.grid_n;
    const std::array<CVector, 3> z{z1, z2, z3};

    struct Row
    {
        std::vector<Complex> feasible;
        Complex best = 0.0;
        double best_eig = -std::numeric_limits<double>::infinity();
    };
    std::vector<Row> rows(static_cast<std::size_t>(n));

    auto scan_row = [&](int i) {
        Row& row = rows[static_cast<std::size_t>(i)];
        const double y = -1.0 + 2.0 * i / (n - 1);
        for (int j = 0; j < n; ++j)
        {
            const Complex w(-1.0 + 2.0 * j / (n - 1), y);
            if (!(std::abs(w) < 1.0 - opt.boundary_margin))
            {
                continue;
            }
            const auto verdict = is_psd(detail::da_pick3(z, {0.0, pc.cstar, w}), opt.psd_tol);
            if (verdict.is_psd)
            {
                row.feasible.push_back(w);
            }
            if (verdict.min_eigenvalue > row.best_eig)
            {
                row.best_eig = verdict.min_eigenvalue;
                row.best     = w;
            }
        }
    };

    const unsigned threads = std::max(1u, opt.threads);
    if (threads == 1)
    {
        for (int i = 0; i < n; ++i)
        {
            scan_row(i);
        }
    }
    else
    {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
        {
            pool.emplace_back([&, t] {
                for (int i = static_cast<int>(t); i < n; i += static_cast<int>(threads))
                {
                    scan_row(i);
                }
            });
        }
        for (auto& th : pool)
        {
            th.join();
        }
    }

    ScanResult out;
    out.grid_n = n;
    for (const Row& row : rows)
    {
        out.feasible.insert(out.feasible.end(), row.feasible.begin(), row.feasible.end());
        if (row.best_eig > out.best_min_eigenvalue)
        {
            out.best_min_eigenvalue = row.best_eig;
            out.best                = row.best;
        }
    }
    return out;
}

struct ProofStepReport
{
    CMatrix normalized_kernel; // k_ij = K(z_i,z_j) / sqrt(K(z_i,z_i) K(z_j,z_j))
    double theta = 0.0;        // phase matrix entry (1,2) = e^{i theta}
    double sigma = 0.0;        // phase matrix entry (1,3) = e^{i sigma}
    double determinant_lhs = 0.0;
    double determinant_rhs = 0.0;
    // With k_12^2 / (1 - m_12^2) = 1 the right side is am_gm_a + am_gm_b and
    // the left side is at most 2 sqrt(a b) * phase_alignment.
    double am_gm_a         = 0.0;
    double am_gm_b         = 0.0;
    double phase_alignment = 0.0;
    bool tight             = false;
};

/// Evaluates the determinant inequality for the 3x3 Pick matrix with targets
/// (0, c*, w3) after normalizing the kernel and rotating k_12, k_13 to be
/// positive.
inline ProofStepReport proof_inequality_check(const CVector& z1, const CVector& z2,
                                              const CVector& z3, Complex w3,
                                              double psd_tol = default_psd_tol)
{
    const auto pc = predicted_phase(z1, z2, z3);
    if (!(std::abs(w3) < 1.0))
    {
        throw InputError("proof_inequality_check: w3 must lie in the open unit disc");
    }
    const std::array<CVector, 3> z{z1, z2, z3};
    const std::array<Complex, 3> w{0.0, pc.cstar, w3};
    if (!is_psd(detail::da_pick3(z, w), psd_tol).is_psd)
    {
        throw InputError("proof_inequality_check: the 3x3 Pick matrix is not PSD");
    }

    ProofStepReport rep;
    CMatrix kern(3, 3);
    for (int i = 0; i < 3; ++i)
    {
        for (int j = 0; j < 3; ++j)
        {
            kern(i, j) = 1.0 / (1.0 - inner(z[i], z[j]));
        }
    }
    rep.normalized_kernel = CMatrix(3, 3);
    for (int i = 0; i < 3; ++i)
    {
        for (int j = 0; j < 3; ++j)
        {
            rep.normalized_kernel(i, j) =
                kern(i, j) / std::sqrt(kern(i, i).real() * kern(j, j).real());
        }
    }
    rep.theta = -std::arg(rep.normalized_kernel(0, 1));
    rep.sigma = -std::arg(rep.normalized_kernel(0, 2));

    // Schur product with the rank-one phase matrix v v*, v = (1, e^{-i theta}, e^{-i sigma}).
    const CVector v{{1.0, std::polar(1.0, -rep.theta), std::polar(1.0, -rep.sigma)}};
    const CMatrix rotated = rep.normalized_kernel.cwiseProduct(v * v.adjoint());
    const double k12 = rotated(0, 1).real();
    const double k31 = rotated(2, 0).real();
    const Complex k23 = rotated(1, 2);

    auto m2 = [&](int i, int j) {
        const double m = std::abs(w[i] - w[j]) / std::abs(1.0 - w[i] * std::conj(w[j]));
        return m * m;
    };
    const double m12 = m2(0, 1);
    const double m23 = m2(1, 2);
    const double m31 = m2(2, 0);

    const Complex prod = (1.0 - w[0] * std::conj(w[1])) * (1.0 - w[1] * std::conj(w[2])) *
                         (1.0 - w[2] * std::conj(w[0]));
    const Complex k23_phase = std::abs(k23) > 0.0 ? detail::unit(k23) : Complex(1.0);
    rep.phase_alignment = (k23_phase * detail::unit(prod)).real();

    const double lead = k12 * std::abs(k23) * k31 / std::sqrt((1.0 - m12) * (1.0 - m23) * (1.0 - m31));
    rep.determinant_lhs = lead * 2.0 * rep.phase_alignment;
    rep.am_gm_a         = std::norm(k23) / (1.0 - m23);
    rep.am_gm_b         = k31 * k31 / (1.0 - m31);
    rep.determinant_rhs = k12 * k12 / (1.0 - m12) + rep.am_gm_a + rep.am_gm_b - 1.0;
    rep.tight           = std::abs(rep.determinant_lhs - rep.determinant_rhs) <= 1e-8;
    return rep;
}

} // namespace schur_agler
