#include <gtest/gtest.h>

#include "schur_agler/acceptance.hpp"
#include "schur_agler/realization.hpp"
#include "schur_agler/sampling.hpp"

using namespace schur_agler;

namespace {

const Domain bidisc = Domain::polydisc(2);

DomainPoint bi(Complex a, Complex b) { return DomainPoint(bidisc, CVector{{a, b}}); }

BlockDiagonal disc_block(Complex z) { return {CVector::Constant(1, z), {1}}; }

} // namespace

TEST(TransferEval, ZeroStateIsConstant)
{
    sampling::Rng rng(1);
    const auto col = sampling::colligation(rng, {2, 3});
    EXPECT_EQ(transfer_eval(col, BlockDiagonal{CVector::Zero(2), {2, 3}}), col.a);
}

TEST(TransferEval, SwapGivesIdentity)
{
    CMatrix v(2, 2);
    v << 0, 1, 1, 0;
    const auto col = Colligation::from_unitary(v, {1});
    for (Complex z : {Complex(0.0), Complex(0.5, -0.2), Complex(-0.9, 0.1)})
        EXPECT_NEAR(std::abs(transfer_eval(col, disc_block(z)) - z), 0.0, 1e-15);
}

TEST(TransferEval, Errors)
{
    CMatrix v = CMatrix::Identity(2, 2);
    const auto col = Colligation::from_unitary(v, {1});
    EXPECT_THROW(transfer_eval(col, BlockDiagonal{CVector::Zero(2), {1, 0}}), InputError);
    // D = 1 and Delta = 1 make I - D Delta vanish.
    EXPECT_THROW(transfer_eval(col, disc_block(1.0)), NumericalError);
    EXPECT_THROW(Colligation::from_unitary(CMatrix::Identity(3, 3), {1}), InputError);
}

TEST(TransferEval, SchurBoundOnDisc)
{
    sampling::Rng rng(2);
    const auto col = sampling::colligation(rng, {6});
    ASSERT_LE(col.unitarity_defect(), 1e-12);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j)
        {
            const Complex z = std::polar(0.999 * (i + 0.5) / 100.0, 2.0 * std::numbers::pi * j / 100.0);
            worst = std::max(worst, std::abs(transfer_eval(col, BlockDiagonal{CVector::Constant(1, z), {6}})));
        }
    EXPECT_LE(worst, 1.0 + 1e-9);
    EXPECT_GT(worst, 0.1);
}

TEST(TransferEval, SchurBoundOnBidisc)
{
    sampling::Rng rng(3);
    const auto fam = agler_family(bidisc);
    for (int k = 0; k < 5; ++k)
    {
        const auto col = sampling::colligation(rng, {2, 3});
        for (int i = 0; i < 2000; ++i)
        {
            const auto z = sampling::point(rng, bidisc, 0.999);
            EXPECT_LE(std::abs(transfer_eval(col, family_block(fam, z, col.block_dims))), 1.0 + 1e-9);
        }
    }
}

TEST(LurkingIsometry, SingleNode)
{
    const Complex a0(0.3, -0.4);
    const PickData data(bidisc, {bi(0, 0)}, {a0});
    const AglerCertificate cert{{HermitianMatrix(CMatrix::Constant(1, 1, 1.0 - std::norm(a0))),
                                 HermitianMatrix::zero(1)}};
    const auto col = lurking_isometry(data, cert);
    EXPECT_NEAR(std::abs(col.a - a0), 0.0, 1e-12);
    EXPECT_LE(col.unitarity_defect(), 1e-12);
    const auto fam = agler_family(bidisc);
    EXPECT_NEAR(std::abs(transfer_eval(col, family_block(fam, bi(0, 0), col.block_dims)) - a0), 0.0, 1e-12);
}

TEST(LurkingIsometry, DiscSchwarzExtremalIsIdentity)
{
    const PickData data(Domain::disc(), {DomainPoint::disc(0.0), DomainPoint::disc(0.5)}, {0.0, 0.5});
    const std::vector<TestFunction> fam{TestFunction::identity()};
    const AglerCertificate cert{{HermitianMatrix(CMatrix::Ones(2, 2))}};
    const auto col = lurking_isometry(data, cert, fam);
    EXPECT_LE(col.unitarity_defect(), 1e-9);
    double worst = 0.0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
        {
            const Complex z = std::polar(0.95 * (i + 1) / 8.0, 2.0 * std::numbers::pi * j / 8.0);
            worst = std::max(worst, std::abs(transfer_eval(col, family_block(fam, DomainPoint::disc(z), col.block_dims)) - z));
        }
    EXPECT_LE(worst, 1e-9);
}

TEST(LurkingIsometry, ProductOfCoordinates)
{
    sampling::Rng rng(4);
    std::vector<DomainPoint> z;
    std::vector<Complex> w;
    for (int i = 0; i < 5; ++i)
    {
        z.push_back(sampling::point(rng, bidisc));
        w.push_back(z.back()[0] * z.back()[1]);
    }
    const PickData data(bidisc, z, w);
    const auto res = agler_decompose(data);
    ASSERT_TRUE(res.ok());
    const auto col = lurking_isometry(data, res.certificate);
    EXPECT_LE(realization_check(col, data), 1e-7);
    EXPECT_LE(col.unitarity_defect(), 1e-9);
}

TEST(LurkingIsometry, RejectsBadCertificate)
{
    const PickData data(bidisc, {bi(0, 0), bi(0.2, 0.1)}, {0.0, 0.1});
    const AglerCertificate zero{{HermitianMatrix::zero(2), HermitianMatrix::zero(2)}};
    EXPECT_THROW(lurking_isometry(data, zero), InputError);
}

TEST(LurkingIsometry, RoundTripOnColligationData)
{
    sampling::Rng rng(5);
    for (std::size_t n = 2; n <= 6; ++n)
    {
        const auto data = acceptance::detail::colligation_pick_problem(rng, n);
        const auto res  = agler_decompose(data);
        ASSERT_TRUE(res.ok()) << n;
        const auto col = lurking_isometry(data, res.certificate);
        EXPECT_LE(realization_check(col, data), 1e-6) << n;
        EXPECT_LE(col.unitarity_defect(), 1e-9) << n;
        // State dimension is the sum of block ranks.
        Index total = 0;
        for (Index d : col.block_dims)
            total += d;
        EXPECT_EQ(total, col.state_dim());
        EXPECT_LE(total, static_cast<Index>(2 * n));
    }
}

TEST(RealizationCheck, GrowsLinearlyWithPerturbation)
{
    sampling::Rng rng(6);
    const auto data = acceptance::detail::colligation_pick_problem(rng, 4);
    const auto res  = agler_decompose(data);
    ASSERT_TRUE(res.ok());
    const auto col  = lurking_isometry(data, res.certificate);
    const double e0 = realization_check(col, data);
    const CVector dir = sampling::gaussian_vector(rng, col.state_dim()).normalized();
    std::vector<double> err;
    for (double eps : {1e-3, 1e-4, 1e-5})
    {
        auto p = col;
        p.C += eps * dir;
        err.push_back(realization_check(p, data));
    }
    EXPECT_GT(err[2], 10.0 * e0);
    EXPECT_NEAR(err[0] / err[1], 10.0, 1.0);
    EXPECT_NEAR(err[1] / err[2], 10.0, 1.0);
}

TEST(RealizationCheck, EmptyData)
{
    sampling::Rng rng(7);
    const auto col = sampling::colligation(rng, {1, 1});
    EXPECT_EQ(realization_check(col, PickData(bidisc, {}, {})), 0.0);
}

TEST(Colligation, PointwiseLimitOfFamily)
{
    // V(t) = V0 exp(i t H) converges to V0; transfer functions converge at rate O(t).
    sampling::Rng rng(8);
    const CMatrix v0 = sampling::unitary(rng, 5);
    const CMatrix h  = sampling::hermitian(rng, 5);
    Eigen::ComplexEigenSolver<CMatrix> es(h);
    auto v_at = [&](double t) {
        const CVector ph = (Complex(0, t) * es.eigenvalues()).array().exp();
        return CMatrix(v0 * es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint());
    };
    const auto fam = agler_family(bidisc);
    const auto base = Colligation::from_unitary(v0, {2, 2});
    std::vector<DomainPoint> pts;
    for (int i = 0; i < 50; ++i)
        pts.push_back(sampling::point(rng, bidisc, 0.9));
    double prev = std::numeric_limits<double>::infinity();
    for (double t : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5})
    {
        const auto col = Colligation::from_unitary(v_at(t), {2, 2});
        EXPECT_LE(col.unitarity_defect(), 1e-12);
        double gap = 0.0;
        for (const auto& z : pts)
            gap = std::max(gap, std::abs(transfer_eval(col, family_block(fam, z, col.block_dims)) -
                                         transfer_eval(base, family_block(fam, z, base.block_dims))));
        EXPECT_LT(gap, prev);
        EXPECT_LT(gap, 1e3 * t);
        prev = gap;
    }
    EXPECT_LT(prev, 1e-2);
}
