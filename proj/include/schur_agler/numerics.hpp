///
/// \file numerics.hpp
///
/// Dense complex Hermitian linear algebra used by every other module: a
/// cyclic Jacobi eigensolver, PSD verdicts, Gram factorization, unitary
/// completion of a Gram-preserving map, and an alternating-projection
/// feasibility solver for "tuple of PSD blocks inside an affine subspace".
///
/// Inner products are linear in the first argument and conjugate-linear in
/// the second: <x, y> = sum_k x_k conj(y_k).
///

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "schur_agler/error.hpp"

namespace schur_agler {

using Complex = std::complex<double>;
using Index   = Eigen::Index;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// <x, y>, linear in x.
inline Complex inner(const CVector& x, const CVector& y)
{
    // Plain loop: g++ 11 at -O3 miscompiles Eigen's complex dot redux in some
    // inlined contexts (emits an unconditional self-jump).
    Complex s = 0.0;
    for (Index i = 0; i < x.size(); ++i)
        s += x[i] * std::conj(y[i]);
    return s;
}

inline double max_abs(const CMatrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

//------------------------------------------------------------------------------
// HermitianMatrix
//------------------------------------------------------------------------------

class HermitianMatrix
{
public:
    static constexpr double symmetry_tolerance = 1e-12;

    HermitianMatrix() = default;

    /// Validates Hermitian symmetry relative to the largest entry and then
    /// stores the exactly symmetrized matrix (M + M*)/2.
    explicit HermitianMatrix(const CMatrix& m)
    {
        if (m.rows() != m.cols())
        {
            throw InputError("HermitianMatrix: matrix is not square");
        }
        const double scale = schur_agler::max_abs(m);
        const double asym  = schur_agler::max_abs(CMatrix(m - m.adjoint()));
        if (asym > symmetry_tolerance * scale)
        {
            std::ostringstream os;
            os << "HermitianMatrix: asymmetry " << asym << " exceeds "
               << symmetry_tolerance << " * " << scale;
            throw InputError(os.str());
        }
        m_data = 0.5 * (m + m.adjoint());
    }

    static HermitianMatrix zero(Index n)
    {
        return HermitianMatrix(CMatrix::Zero(n, n));
    }

    static HermitianMatrix identity(Index n)
    {
        return HermitianMatrix(CMatrix::Identity(n, n));
    }

    Index dim() const noexcept { return m_data.rows(); }
    const CMatrix& matrix() const noexcept { return m_data; }
    Complex operator()(Index i, Index j) const { return m_data(i, j); }
    double max_abs() const { return schur_agler::max_abs(m_data); }

private:
    CMatrix m_data;
};

//------------------------------------------------------------------------------
// Cyclic Jacobi eigensolver
//------------------------------------------------------------------------------

struct HermitianEigen
{
    RVector values;  // ascending
    CMatrix vectors; // column k pairs with values[k]
};

/// Cyclic Jacobi for complex Hermitian matrices. Each rotation first removes
/// the phase of the pivot with a diagonal unitary and then applies a real
/// symmetric Jacobi rotation, so the combined 2x2 transform is unitary.
inline HermitianEigen hermitian_eigen(const HermitianMatrix& h)
{
    const Index n = h.dim();
    CMatrix a     = h.matrix();
    CMatrix v     = CMatrix::Identity(n, n);

    const double norm = a.norm();
    constexpr int max_sweeps = 60;
    const double stop = 1e-15 * norm * std::sqrt(static_cast<double>(n));
    for (int sweep = 0; sweep < max_sweeps && norm > 0.0; ++sweep)
    {
        double off = 0.0;
        for (Index p = 0; p < n; ++p)
        {
            for (Index q = p + 1; q < n; ++q)
            {
                off += std::norm(a(p, q));
            }
        }
        if (std::sqrt(off) <= stop)
        {
            break;
        }

        for (Index p = 0; p < n; ++p)
        {
            for (Index q = p + 1; q < n; ++q)
            {
                const Complex apq = a(p, q);
                const double mag  = std::abs(apq);
                if (mag == 0.0)
                {
                    continue;
                }
                const Complex phase = apq / mag;
                const Complex d     = std::conj(phase);
                const double app    = a(p, p).real();
                const double aqq    = a(q, q).real();

                const double tau = (aqq - app) / (2.0 * mag);
                const double t   = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // J = [[c, s], [-s d, c d]] acting on columns (p, q).
                const Complex jqp = -s * d;
                const Complex jqq = c * d;
                for (Index k = 0; k < n; ++k)
                {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p)           = akp * c + akq * jqp;
                    a(k, q)           = akp * s + akq * jqq;
                }
                for (Index k = 0; k < n; ++k)
                {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k)           = c * apk + std::conj(jqp) * aqk;
                    a(q, k)           = s * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (Index k = 0; k < n; ++k)
                {
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p)           = vkp * c + vkq * jqp;
                    v(k, q)           = vkp * s + vkq * jqq;
                }
            }
        }
    }

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
        return a(i, i).real() < a(j, j).real();
    });

    HermitianEigen out{RVector(n), CMatrix(n, n)};
    for (Index k = 0; k < n; ++k)
    {
        out.values[k]     = a(order[k], order[k]).real();
        out.vectors.col(k) = v.col(order[k]);
    }
    return out;
}

inline RVector hermitian_eigenvalues(const HermitianMatrix& h)
{
    return hermitian_eigen(h).values;
}

//------------------------------------------------------------------------------
// PSD verdicts and Gram factorization
//------------------------------------------------------------------------------

inline constexpr double default_psd_tol  = 1e-9;
inline constexpr double default_rank_tol = 1e-10;

struct PsdVerdict
{
    bool is_psd           = true;
    double min_eigenvalue = 0.0;
    double tolerance_used = 0.0;
};

/// PSD within tol * max(1, maxabs(M)).
inline PsdVerdict is_psd(const HermitianMatrix& m, double tol = default_psd_tol)
{
    if (tol < 0.0)
    {
        throw InputError("is_psd: tolerance must be nonnegative");
    }
    PsdVerdict verdict;
    verdict.tolerance_used = tol * std::max(1.0, m.max_abs());
    if (m.dim() == 0)
    {
        return verdict;
    }
    verdict.min_eigenvalue = hermitian_eigenvalues(m)[0];
    verdict.is_psd         = verdict.min_eigenvalue >= -verdict.tolerance_used;
    return verdict;
}

/// Columns g_i (one per row of the source matrix) with <g_j, g_i> = M(i, j).
struct GramFactor
{
    Index rank = 0;
    CMatrix columns; // rank x n

    CVector column(Index i) const { return columns.col(i); }

    CMatrix reconstruct() const { return columns.adjoint() * columns; }
};

inline GramFactor gram_factor(const HermitianMatrix& m,
                              double rank_tol = default_rank_tol,
                              double psd_tol  = default_psd_tol)
{
    const Index n = m.dim();
    GramFactor out;
    out.columns.resize(0, n);
    if (n == 0)
    {
        return out;
    }
    const auto eig   = hermitian_eigen(m);
    const double big = m.max_abs();
    if (eig.values[0] < -psd_tol * std::max(1.0, big))
    {
        std::ostringstream os;
        os << "gram_factor: matrix is indefinite (min eigenvalue "
           << eig.values[0] << ")";
        throw InputError(os.str());
    }
    const double cutoff = rank_tol * big;
    std::vector<Index> kept;
    for (Index k = n - 1; k >= 0; --k)
    {
        if (eig.values[k] > cutoff)
        {
            kept.push_back(k);
        }
    }
    out.rank = static_cast<Index>(kept.size());
    out.columns.resize(out.rank, n);
    for (Index r = 0; r < out.rank; ++r)
    {
        const Index k        = kept[static_cast<std::size_t>(r)];
        const double scale   = std::sqrt(eig.values[k]);
        out.columns.row(r) = scale * eig.vectors.col(k).adjoint();
    }
    return out;
}

//------------------------------------------------------------------------------
// Unitary completion
//------------------------------------------------------------------------------

inline double unitarity_defect(const CMatrix& u)
{
    if (u.size() == 0)
    {
        return 0.0;
    }
    return max_abs(u * u.adjoint() - CMatrix::Identity(u.rows(), u.rows()));
}

/// Nearest unitary in Frobenius norm (polar factor).
inline CMatrix polar_unitary(const CMatrix& m)
{
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

inline constexpr double default_gram_tol = 1e-6;

/// Unitary W with W * sources.col(j) = targets.col(j). The shorter side is
/// zero-padded so both live in the same space. W is the unitary Procrustes
/// fit (polar factor of T S*), which is exact when the Gram matrices agree
/// and least-squares otherwise.
inline CMatrix unitary_completion(const CMatrix& sources, const CMatrix& targets,
                                  double gram_tol = default_gram_tol)
{
    if (sources.cols() != targets.cols())
    {
        throw InputError("unitary_completion: source and target counts differ");
    }
    const Index dim = std::max(sources.rows(), targets.rows());
    CMatrix s       = CMatrix::Zero(dim, sources.cols());
    CMatrix t       = CMatrix::Zero(dim, targets.cols());
    s.topRows(sources.rows()) = sources;
    t.topRows(targets.rows()) = targets;

    const CMatrix gs      = s.adjoint() * s;
    const CMatrix gt      = t.adjoint() * t;
    const double mismatch = max_abs(gs - gt);
    if (mismatch > gram_tol * std::max(1.0, max_abs(gs)))
    {
        std::ostringstream os;
        os << "unitary_completion: Gram mismatch " << mismatch
           << " exceeds tolerance";
        throw InputError(os.str());
    }
    if (dim == 0)
    {
        return CMatrix(0, 0);
    }
    return polar_unitary(t * s.adjoint());
}

//------------------------------------------------------------------------------
// Affine constraints on a tuple of Hermitian blocks
//------------------------------------------------------------------------------

/// Real linear system over the real coordinates of a tuple of Hermitian
/// blocks. Coordinates are scaled so the Euclidean norm of the coordinate
/// vector equals the Frobenius norm of the tuple: diagonal entries are
/// stored as-is, each strict upper entry as sqrt(2) * (re, im).
class HermitianAffineSystem
{
public:
    struct Term
    {
        std::size_t block;
        Index row;
        Index col;
        Complex coeff;
    };

    explicit HermitianAffineSystem(std::vector<Index> block_dims)
        : m_dims(std::move(block_dims))
    {
        Index offset = 0;
        for (Index d : m_dims)
        {
            if (d < 0)
            {
                throw InputError("HermitianAffineSystem: negative block dimension");
            }
            m_offsets.push_back(offset);
            offset += d * d;
        }
        m_num_params = offset;
    }

    const std::vector<Index>& block_dims() const noexcept { return m_dims; }
    Index num_params() const noexcept { return m_num_params; }
    Index num_rows() const noexcept { return static_cast<Index>(m_rows.size()); }

    /// Adds Re and Im of sum(coeff * X_block(row, col)) = rhs.
    void add_complex(std::span<const Term> terms, Complex rhs)
    {
        auto [re, im] = expand(terms);
        push(std::move(re), rhs.real());
        push(std::move(im), rhs.imag());
    }

    /// Adds only Re(sum(coeff * X_block(row, col))) = rhs.
    void add_real(std::span<const Term> terms, double rhs)
    {
        push(expand(terms).first, rhs);
    }

    RMatrix matrix() const
    {
        RMatrix a(num_rows(), m_num_params);
        for (Index r = 0; r < num_rows(); ++r)
        {
            a.row(r) = m_rows[static_cast<std::size_t>(r)].transpose();
        }
        return a;
    }

    RVector rhs() const
    {
        return Eigen::Map<const RVector>(m_rhs.data(), num_rows());
    }

    RVector pack(std::span<const HermitianMatrix> blocks) const
    {
        check_blocks(blocks.size());
        RVector x(m_num_params);
        for (std::size_t b = 0; b < m_dims.size(); ++b)
        {
            const CMatrix& m = blocks[b].matrix();
            if (m.rows() != m_dims[b])
            {
                throw InputError("HermitianAffineSystem: block dimension mismatch");
            }
            pack_block(b, m, x);
        }
        return x;
    }

    std::vector<HermitianMatrix> unpack(const RVector& x) const
    {
        std::vector<HermitianMatrix> out;
        out.reserve(m_dims.size());
        for (std::size_t b = 0; b < m_dims.size(); ++b)
        {
            out.emplace_back(unpack_block(b, x));
        }
        return out;
    }

    CMatrix unpack_block(std::size_t b, const RVector& x) const
    {
        const Index n = m_dims[b];
        CMatrix m(n, n);
        for (Index i = 0; i < n; ++i)
        {
            m(i, i) = x[diag_index(b, i)];
            for (Index j = i + 1; j < n; ++j)
            {
                const Index k = upper_index(b, i, j);
                const Complex z(x[k] / std::sqrt(2.0), x[k + 1] / std::sqrt(2.0));
                m(i, j) = z;
                m(j, i) = std::conj(z);
            }
        }
        return m;
    }

    void pack_block(std::size_t b, const CMatrix& m, RVector& x) const
    {
        const Index n = m_dims[b];
        for (Index i = 0; i < n; ++i)
        {
            x[diag_index(b, i)] = m(i, i).real();
            for (Index j = i + 1; j < n; ++j)
            {
                const Index k = upper_index(b, i, j);
                x[k]          = std::sqrt(2.0) * m(i, j).real();
                x[k + 1]      = std::sqrt(2.0) * m(i, j).imag();
            }
        }
    }

private:
    Index diag_index(std::size_t b, Index i) const { return m_offsets[b] + i; }

    // Strict upper entries follow the diagonal, row-major, two slots each.
    Index upper_index(std::size_t b, Index i, Index j) const
    {
        const Index n      = m_dims[b];
        const Index before = i * n - i * (i + 1) / 2; // entries in rows < i
        return m_offsets[b] + n + 2 * (before + (j - i - 1));
    }

    void check_blocks(std::size_t count) const
    {
        if (count != m_dims.size())
        {
            throw InputError("HermitianAffineSystem: wrong number of blocks");
        }
    }

    std::pair<RVector, RVector> expand(std::span<const Term> terms) const
    {
        RVector re = RVector::Zero(m_num_params);
        RVector im = RVector::Zero(m_num_params);
        const double r2 = std::sqrt(2.0);
        for (const Term& t : terms)
        {
            if (t.block >= m_dims.size() || t.row < 0 || t.col < 0 ||
                t.row >= m_dims[t.block] || t.col >= m_dims[t.block])
            {
                throw InputError("HermitianAffineSystem: term index out of range");
            }
            const double cr = t.coeff.real();
            const double ci = t.coeff.imag();
            if (t.row == t.col)
            {
                const Index k = diag_index(t.block, t.row);
                re[k] += cr;
                im[k] += ci;
                continue;
            }
            const bool upper = t.row < t.col;
            const Index k    = upper ? upper_index(t.block, t.row, t.col)
                                     : upper_index(t.block, t.col, t.row);
            // X(row, col) = (p + i q) / sqrt2 above the diagonal, conjugate below.
            const double sq = upper ? 1.0 : -1.0;
            re[k] += cr / r2;
            re[k + 1] += -ci * sq / r2;
            im[k] += ci / r2;
            im[k + 1] += cr * sq / r2;
        }
        return {std::move(re), std::move(im)};
    }

    void push(RVector row, double rhs)
    {
        m_rows.push_back(std::move(row));
        m_rhs.push_back(rhs);
    }

    std::vector<Index> m_dims;
    std::vector<Index> m_offsets;
    Index m_num_params = 0;
    std::vector<RVector> m_rows;
    std::vector<double> m_rhs;
};

//------------------------------------------------------------------------------
// Dykstra alternating projections
//------------------------------------------------------------------------------

struct FeasibilityResult
{
    enum class Status
    {
        certificate,
        budget_exhausted,
    };

    Status status  = Status::budget_exhausted;
    int iterations = 0;
    double residual = std::numeric_limits<double>::infinity();
    std::vector<HermitianMatrix> solution;

    bool ok() const noexcept { return status == Status::certificate; }
};

inline const char* to_string(FeasibilityResult::Status s)
{
    return s == FeasibilityResult::Status::certificate ? "certificate"
                                                       : "budget_exhausted";
}

namespace detail {

inline CMatrix clip_psd(const CMatrix& m)
{
    if (m.rows() == 0)
    {
        return m;
    }
    const auto eig = hermitian_eigen(HermitianMatrix(0.5 * (m + m.adjoint())));
    const RVector clipped = eig.values.cwiseMax(0.0);
    return eig.vectors * clipped.cast<Complex>().asDiagonal() *
           eig.vectors.adjoint();
}

inline RVector project_cone(const HermitianAffineSystem& sys, const RVector& x)
{
    RVector y(x.size());
    for (std::size_t b = 0; b < sys.block_dims().size(); ++b)
    {
        sys.pack_block(b, clip_psd(sys.unpack_block(b, x)), y);
    }
    return y;
}

inline double cone_violation(std::span<const HermitianMatrix> blocks)
{
    double worst = 0.0;
    for (const auto& b : blocks)
    {
        if (b.dim() > 0)
        {
            worst = std::max(worst, -hermitian_eigenvalues(b)[0]);
        }
    }
    return worst;
}

/// Gauss-Newton on Gram factors X_b = G_b* G_b. Every iterate is PSD by
/// construction, so only the affine residual has to be driven down. Used to
/// finish Dykstra runs that stall near rank-deficient solutions.
inline std::pair<RVector, double> polish_factored(const HermitianAffineSystem& sys,
                                                  const RMatrix& a,
                                                  const RVector& b,
                                                  const RVector& start,
                                                  int max_steps, double target)
{
    const auto& dims = sys.block_dims();
    std::vector<CMatrix> factors;
    for (std::size_t k = 0; k < dims.size(); ++k)
    {
        const CMatrix m = sys.unpack_block(k, start);
        if (m.rows() == 0)
        {
            factors.emplace_back(0, 0);
            continue;
        }
        const auto eig = hermitian_eigen(HermitianMatrix(m));
        CMatrix g(m.rows(), m.rows());
        for (Index r = 0; r < m.rows(); ++r)
        {
            g.row(r) = std::sqrt(std::max(eig.values[r], 0.0)) *
                       eig.vectors.col(r).adjoint();
        }
        factors.push_back(std::move(g));
    }

    auto assemble = [&](const std::vector<CMatrix>& gs) {
        RVector x(sys.num_params());
        for (std::size_t k = 0; k < dims.size(); ++k)
        {
            sys.pack_block(k, gs[k].adjoint() * gs[k], x);
        }
        return x;
    };
    auto residual_of = [&](const RVector& x) {
        return a.rows() == 0 ? 0.0 : (a * x - b).cwiseAbs().maxCoeff();
    };

    Index unknowns = 0;
    for (Index d : dims)
    {
        unknowns += 2 * d * d;
    }

    // Levenberg-Marquardt on the squared residual; the Jacobian is singular
    // at rank-deficient solutions, so plain Gauss-Newton steps overshoot.
    RVector x       = assemble(factors);
    RVector r       = a * x - b;
    double sq       = r.squaredNorm();
    double lambda   = 1e-6;
    double checkpoint = sq;
    for (int step = 0; step < max_steps && residual_of(x) > target; ++step)
    {
        // Near singular solutions progress is linear; give up on plateaus.
        if (step > 0 && step % 100 == 0)
        {
            if (sq > 0.25 * checkpoint)
            {
                break;
            }
            checkpoint = sq;
        }
        RMatrix jac(a.rows(), unknowns);
        Index col = 0;
        for (std::size_t k = 0; k < dims.size(); ++k)
        {
            const CMatrix& g = factors[k];
            const Index n    = dims[k];
            for (Index row = 0; row < n; ++row)
            {
                for (Index i = 0; i < n; ++i)
                {
                    for (const Complex part : {Complex(1, 0), Complex(0, 1)})
                    {
                        // dX = dG* G + G* dG with dG = part * e_row e_i^T.
                        CMatrix dx = CMatrix::Zero(n, n);
                        dx.row(i) += std::conj(part) * g.row(row);
                        dx.col(i) += part * g.row(row).adjoint();
                        RVector dvec = RVector::Zero(sys.num_params());
                        sys.pack_block(k, dx, dvec);
                        jac.col(col++) = a * dvec;
                    }
                }
            }
        }
        const RMatrix jtj = jac.transpose() * jac;
        const RVector jtr = jac.transpose() * r;
        const double diag = std::max(jtj.diagonal().maxCoeff(), 1e-300);

        bool improved = false;
        for (int tries = 0; tries < 20; ++tries)
        {
            RMatrix damped = jtj;
            damped.diagonal().array() += lambda * diag;
            const RVector delta = damped.ldlt().solve(-jtr);
            std::vector<CMatrix> trial = factors;
            Index c = 0;
            for (std::size_t k = 0; k < dims.size(); ++k)
            {
                for (Index row = 0; row < dims[k]; ++row)
                {
                    for (Index i = 0; i < dims[k]; ++i)
                    {
                        trial[k](row, i) += Complex(delta[c], delta[c + 1]);
                        c += 2;
                    }
                }
            }
            const RVector xt = assemble(trial);
            const RVector rt = a * xt - b;
            if (rt.squaredNorm() < sq)
            {
                factors  = std::move(trial);
                x        = xt;
                r        = rt;
                sq       = rt.squaredNorm();
                lambda   = std::max(lambda / 3.0, 1e-15);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if (!improved)
        {
            break;
        }
    }
    const double current = residual_of(x);
    return {x, current};
}

} // namespace detail

struct DykstraOptions
{
    int budget       = 20000;
    double tol       = 1e-8;
    bool polish      = true; // factored Gauss-Newton finishing passes
    int polish_steps = 3000;
};

/// Finds a tuple of PSD blocks satisfying the affine system by Dykstra's
/// alternating projections between the product PSD cone (eigenvalue clipping
/// per block) and the affine set (precomputed least-squares projector),
/// started from the minimum-norm affine solution. budget_exhausted means no
/// certificate was found; it is not a proof of infeasibility.
inline FeasibilityResult dykstra_feasible(const HermitianAffineSystem& sys,
                                          const DykstraOptions& opt = {})
{
    if (opt.budget < 1)
    {
        throw InputError("dykstra_feasible: budget must be at least 1");
    }
    const RMatrix a = sys.matrix();
    const RVector b = sys.rhs();

    RMatrix pinv = RMatrix::Zero(sys.num_params(), a.rows());
    if (a.rows() > 0 && sys.num_params() > 0)
    {
        pinv = Eigen::CompleteOrthogonalDecomposition<RMatrix>(a).pseudoInverse();
    }
    const RVector x0 = pinv * b;
    auto affine_residual = [&](const RVector& x) {
        return a.rows() == 0 ? 0.0 : (a * x - b).cwiseAbs().maxCoeff();
    };
    const double b_scale = b.size() == 0 ? 0.0 : b.cwiseAbs().maxCoeff();
    if (affine_residual(x0) > 1e-9 * std::max(1.0, b_scale))
    {
        throw InputError("dykstra_feasible: affine system is inconsistent");
    }
    auto project_affine = [&](const RVector& x) -> RVector {
        return a.rows() == 0 ? x : RVector(x - pinv * (a * x - b));
    };

    FeasibilityResult best;
    RVector best_x = detail::project_cone(sys, x0);
    best.residual  = affine_residual(best_x);

    auto finish = [&](const RVector& x, double res, int iters,
                      FeasibilityResult::Status status) {
        FeasibilityResult out;
        out.status     = status;
        out.iterations = iters;
        out.residual   = res;
        out.solution   = sys.unpack(x);
        out.residual += detail::cone_violation(out.solution);
        if (status == FeasibilityResult::Status::certificate &&
            out.residual > opt.tol)
        {
            out.status = FeasibilityResult::Status::budget_exhausted;
        }
        return out;
    };

    auto try_polish = [&](const RVector& y, int iters) -> std::optional<FeasibilityResult> {
        auto [xp, res] = detail::polish_factored(sys, a, b, y, opt.polish_steps, 1e-3 * opt.tol);
        if (res < best.residual)
        {
            best.residual = res;
            best_x        = xp;
        }
        if (res <= opt.tol)
        {
            return finish(xp, res, iters, FeasibilityResult::Status::certificate);
        }
        return std::nullopt;
    };

    RVector x = x0;
    RVector p = RVector::Zero(x.size());
    int next_polish = 500;
    for (int k = 1; k <= opt.budget; ++k)
    {
        const RVector y = detail::project_cone(sys, x + p);
        p               = x + p - y;
        x               = project_affine(y);

        const double res = affine_residual(y);
        if (res < best.residual)
        {
            best.residual = res;
            best_x        = y;
        }
        if (res <= opt.tol)
        {
            auto out = finish(y, res, k, FeasibilityResult::Status::certificate);
            if (out.ok())
            {
                return out;
            }
        }
        if (opt.polish && (k == next_polish || k == opt.budget))
        {
            next_polish *= 2;
            if (auto out = try_polish(y, k); out && out->ok())
            {
                return *out;
            }
        }
    }
    return finish(best_x, affine_residual(best_x), opt.budget,
                  FeasibilityResult::Status::budget_exhausted);
}

} // namespace schur_agler
