#include <gtest/gtest.h>

#include "oracles.hpp"
#include "schur_agler/kernels.hpp"
#include "schur_agler/sampling.hpp"

using namespace schur_agler;

namespace {

DomainPoint bi(Complex a, Complex b) { return DomainPoint(Domain::polydisc(2), CVector{{a, b}}); }

std::vector<DomainPoint> disc_points(sampling::Rng& rng, int n)
{
    std::vector<DomainPoint> out;
    for (int i = 0; i < n; ++i)
        out.push_back(DomainPoint::disc(sampling::disc_point(rng)));
    return out;
}

} // namespace

TEST(KernelEval, Examples)
{
    const Domain b2 = Domain::ball(2);
    EXPECT_EQ(kernel_eval(KernelKind::drury_arveson, DomainPoint::origin(b2), DomainPoint(b2, CVector{{0.3, 0.4}})),
              Complex(1.0));
    EXPECT_NEAR(std::abs(kernel_eval(KernelKind::szego, DomainPoint::disc(0.5), DomainPoint::disc(0.5)) - 4.0 / 3.0),
                0.0, 1e-15);
    EXPECT_NEAR(std::abs(kernel_eval(KernelKind::polydisc_product, bi(0.5, 0), bi(0.5, 0)) - 4.0 / 3.0), 0.0, 1e-15);
    EXPECT_THROW(kernel_eval(KernelKind::szego, DomainPoint::origin(b2), DomainPoint::origin(b2)), InputError);
    EXPECT_THROW(kernel_eval(KernelKind::drury_arveson, bi(0, 0), bi(0, 0)), InputError);
    EXPECT_THROW(kernel_eval(KernelKind::szego, DomainPoint::disc(0.0), bi(0, 0)), InputError);
}

TEST(KernelEval, DruryArvesonIsLinearInFirstSlot)
{
    const Domain b2 = Domain::ball(2);
    const DomainPoint z(b2, CVector{{Complex(0, 0.5), 0.0}}), w(b2, CVector{{0.4, 0.0}});
    // <z, w> = 0.5i * 0.4
    EXPECT_NEAR(std::abs(kernel_eval(KernelKind::drury_arveson, z, w) - 1.0 / (1.0 - Complex(0, 0.2))), 0.0, 1e-15);
}

TEST(KernelMatrix, SzegoGramIsPsd)
{
    sampling::Rng rng(1);
    for (int k = 0; k < 20; ++k)
    {
        const auto km = kernel_matrix(KernelKind::szego, disc_points(rng, 6));
        EXPECT_TRUE(is_psd(km.values).is_psd);
    }
}

TEST(Admissible, SzegoWithIdentity)
{
    sampling::Rng rng(2);
    const auto km        = kernel_matrix(KernelKind::szego, disc_points(rng, 5));
    const TestFunction t = TestFunction::identity();
    const auto rep       = admissible_check(km, std::span(&t, 1));
    EXPECT_TRUE(rep.admissible);
    ASSERT_TRUE(rep.worst_test.has_value());
    // The weighted matrix is all-ones: eigenvalues 0 (x4) and 5.
    EXPECT_NEAR(rep.worst_min_eigenvalue, 0.0, 1e-12);
}

TEST(Admissible, AllOnesKernelFails)
{
    const std::vector<DomainPoint> pts{DomainPoint::disc(0.0), DomainPoint::disc(0.5)};
    const KernelMatrix km{pts, HermitianMatrix(CMatrix::Ones(2, 2))};
    const TestFunction t = TestFunction::identity();
    const auto rep       = admissible_check(km, std::span(&t, 1));
    EXPECT_FALSE(rep.admissible);
    CMatrix weighted(2, 2);
    weighted << 1, 1, 1, 0.75;
    EXPECT_NEAR(rep.worst_min_eigenvalue, oracle::min_eig_2x2(weighted), 1e-14);
}

TEST(Admissible, ZeroKernel)
{
    const std::vector<DomainPoint> pts{DomainPoint::disc(0.1), DomainPoint::disc(-0.4), DomainPoint::disc(0.7)};
    const KernelMatrix km{pts, HermitianMatrix::zero(3)};
    const TestFunction t = TestFunction::identity();
    EXPECT_TRUE(admissible_check(km, std::span(&t, 1)).admissible);
}

TEST(Admissible, IndefiniteKernelReportedWithoutWorstTest)
{
    const std::vector<DomainPoint> pts{DomainPoint::disc(0.0), DomainPoint::disc(0.5)};
    CMatrix m(2, 2);
    m << 1, 2, 2, 1;
    const TestFunction t = TestFunction::identity();
    const auto rep       = admissible_check(KernelMatrix{pts, HermitianMatrix(m)}, std::span(&t, 1));
    EXPECT_FALSE(rep.admissible);
    EXPECT_FALSE(rep.worst_test.has_value());
    EXPECT_NEAR(rep.worst_min_eigenvalue, -1.0, 1e-12);
}

TEST(Admissible, NaturalKernelsAdmitTheirFamilies)
{
    sampling::Rng rng(3);
    for (const auto& d : {Domain::polydisc(2), Domain::polydisc(3), Domain::ball(2), Domain::ball(3)})
    {
        std::vector<DomainPoint> pts;
        for (int i = 0; i < 5; ++i)
            pts.push_back(sampling::point(rng, d));
        const auto km = kernel_matrix(natural_kernel(d), pts);
        std::vector<TestFunction> fam;
        if (d.kind == DomainKind::polydisc)
        {
            fam = TestFamily::full(d).members();
        }
        else
        {
            // Coordinate functionals <z, u> are contractive DA multipliers.
            for (int k = 0; k < 5; ++k)
                fam.push_back(TestFunction::ball_functional(CVector::Zero(d.dim),
                                                            sampling::gaussian_vector(rng, d.dim).normalized()));
        }
        EXPECT_TRUE(admissible_check(km, fam, 1e-9).admissible) << d.tag();
    }
}

TEST(Admissible, MonotoneUnderFamilyGrowth)
{
    sampling::Rng rng(4);
    const Domain d = Domain::polydisc(2);
    int inadmissible_seen = 0;
    for (int k = 0; k < 200; ++k)
    {
        std::vector<DomainPoint> pts;
        for (int i = 0; i < 3; ++i)
            pts.push_back(sampling::point(rng, d));
        // One Szego factor (in a random coordinate) times a random PSD matrix:
        // admissible for that coordinate, usually not for the other.
        const int j = k % 2;
        const auto one = kernel_matrix(KernelKind::szego, {DomainPoint::disc(pts[0][j]),
                                                           DomainPoint::disc(pts[1][j]),
                                                           DomainPoint::disc(pts[2][j])});
        const CMatrix m = one.values.matrix().cwiseProduct(sampling::psd(rng, 3, 3).matrix());
        const KernelMatrix km{pts, HermitianMatrix(m)};
        const auto c1 = TestFunction::coordinate(2, 1), c2 = TestFunction::coordinate(2, 2);
        const std::vector<TestFunction> small{c1}, big{c1, c2};
        const bool a_small = admissible_check(km, small).admissible;
        const bool a_big   = admissible_check(km, big).admissible;
        inadmissible_seen += !a_small;
        EXPECT_TRUE(a_small || !a_big);
    }
    EXPECT_GT(inadmissible_seen, 0);
}

TEST(Admissible, WorstTieKeepsFamilyOrder)
{
    const std::vector<DomainPoint> pts{bi(0, 0), bi(0, 0.3)};
    const KernelMatrix km{pts, HermitianMatrix::zero(2)};
    const std::vector<TestFunction> fam{TestFunction::coordinate(2, 2), TestFunction::coordinate(2, 1)};
    const auto rep = admissible_check(km, fam);
    ASSERT_TRUE(rep.worst_test.has_value());
    EXPECT_EQ(rep.worst_index, 0u);
    EXPECT_THROW(admissible_check(km, std::vector<TestFunction>{}), InputError);
}

TEST(TwoPointKernel, Examples)
{
    const double c = 0.6;
    const auto k   = two_point_kernel(0.0, c, DomainPoint::disc(0.0), DomainPoint::disc(0.5));
    EXPECT_NEAR(std::abs(k.values(0, 0) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(k.values(0, 1) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(k.values(1, 1) - 1.0 / (1.0 - c * c)), 0.0, 1e-15);
    EXPECT_NEAR(kernel_distance_bound(k, 0, 1), c, 1e-15);

    const auto z = two_point_kernel(0.0, 0.0, DomainPoint::disc(0.0), DomainPoint::disc(0.5));
    EXPECT_TRUE(z.values.matrix().isApprox(CMatrix::Ones(2, 2)));
    EXPECT_EQ(kernel_distance_bound(z, 0, 1), 0.0);
    EXPECT_THROW(two_point_kernel(1.0, 0.0, DomainPoint::disc(0.0), DomainPoint::disc(0.5)), InputError);
}

TEST(TwoPointKernel, AlwaysPsdAndBoundIsMobius)
{
    sampling::Rng rng(5);
    for (int k = 0; k < 1000; ++k)
    {
        const Complex a = sampling::disc_point(rng, 0.999), b = sampling::disc_point(rng, 0.999);
        const auto km   = two_point_kernel(a, b, DomainPoint::disc(0.0), DomainPoint::disc(0.5));
        EXPECT_TRUE(is_psd(km.values).is_psd);
        EXPECT_NEAR(kernel_distance_bound(km, 0, 1), mobius_distance(a, b), 1e-9);
    }
}

TEST(KernelDistanceBound, DruryArvesonEqualsBallDistance)
{
    sampling::Rng rng(6);
    for (int m : {2, 3})
    {
        const Domain d = Domain::ball(m);
        for (int k = 0; k < 100; ++k)
        {
            const auto z1 = sampling::point(rng, d), z2 = sampling::point(rng, d);
            const auto km = kernel_matrix(KernelKind::drury_arveson, {z1, z2});
            EXPECT_NEAR(kernel_distance_bound(km, 0, 1), caratheodory_distance(d, z1, z2).value, 1e-12);
        }
    }
}

TEST(KernelDistanceBound, SzegoAndDegenerateCases)
{
    const auto km = kernel_matrix(KernelKind::szego, {DomainPoint::disc(0.0), DomainPoint::disc(0.5)});
    EXPECT_NEAR(kernel_distance_bound(km, 0, 1), 0.5, 1e-15);
    const std::vector<DomainPoint> pts{DomainPoint::disc(0.0), DomainPoint::disc(0.5)};
    CMatrix m = CMatrix::Zero(2, 2);
    m(1, 1)   = 1.0;
    EXPECT_THROW(kernel_distance_bound(KernelMatrix{pts, HermitianMatrix(m)}, 0, 1), InputError);
    EXPECT_THROW(kernel_distance_bound(km, 0, 2), InputError);
}

TEST(Sandwich, Examples)
{
    const TestFunction id = TestFunction::identity();
    const auto s = dpsi_sandwich(Domain::disc(), std::span(&id, 1), DomainPoint::disc(0.0), DomainPoint::disc(0.5));
    EXPECT_NEAR(s.lower, 0.5, 1e-15);
    EXPECT_NEAR(s.upper, 0.5, 1e-15);
    EXPECT_NEAR(s.gap, 0.0, 1e-15);

    const Domain d = Domain::polydisc(2);
    const auto full = TestFamily::full(d).members();
    const auto t    = dpsi_sandwich(d, std::span<const TestFunction>(full), bi(0, 0), bi(0.3, 0.7));
    EXPECT_NEAR(t.lower, 0.7, 1e-15);
    EXPECT_NEAR(t.upper, 0.7, 1e-12);
    EXPECT_EQ(t.witness.coordinate_index(), 2);

    const TestFunction c1 = TestFunction::coordinate(2, 1);
    const auto u = dpsi_sandwich(d, std::span(&c1, 1), bi(0, 0), bi(0, 0.5));
    EXPECT_EQ(u.lower, 0.0);
    EXPECT_NEAR(caratheodory_distance(d, bi(0, 0), bi(0, 0.5)).value - u.lower, 0.5, 1e-15);
}

TEST(Sandwich, FullFamiliesCloseTheGap)
{
    sampling::Rng rng(7);
    for (const auto& d : {Domain::disc(), Domain::polydisc(2), Domain::polydisc(3), Domain::ball(2),
                          Domain::symmetrized_bidisc()})
    {
        const auto fam   = TestFamily::full(d);
        const double tol = d.kind == DomainKind::symmetrized_bidisc ? 1e-5 : 1e-6;
        for (int k = 0; k < 50; ++k)
        {
            const auto z1 = sampling::point(rng, d), z2 = sampling::point(rng, d);
            const auto s  = dpsi_sandwich(d, fam, z1, z2);
            EXPECT_LE(s.gap, 1e-6) << d.tag();
            EXPECT_GE(s.gap, -1e-12) << d.tag();
            EXPECT_NEAR(s.lower, caratheodory_distance(d, z1, z2).value, tol) << d.tag();
        }
    }
}

TEST(Sandwich, RejectsPointsOutsideDomain)
{
    const TestFunction id = TestFunction::identity();
    EXPECT_THROW(dpsi_sandwich(Domain::disc(), std::span(&id, 1), bi(0, 0), bi(0, 0.1)), InputError);
}

TEST(KernelDistanceBound, DominatesFamilyOnAdmissibleKernels)
{
    // If (1 - f(z_i) conj f(z_j)) K_ij >= 0 on two points, then its determinant
    // gives m(f(z1), f(z2)) <= the kernel bound.
    sampling::Rng rng(8);
    for (const auto& d : {Domain::polydisc(2), Domain::ball(2), Domain::disc()})
    {
        std::vector<TestFunction> fam;
        if (d.kind == DomainKind::ball)
        {
            for (int k = 0; k < 64; ++k)
                fam.push_back(TestFunction::ball_functional(sampling::ball_point(rng, d.dim),
                                                            sampling::gaussian_vector(rng, d.dim).normalized()));
        }
        else
        {
            fam = TestFamily::full(d).members();
        }
        for (int k = 0; k < 100; ++k)
        {
            const auto z1 = sampling::point(rng, d), z2 = sampling::point(rng, d);
            const auto km = kernel_matrix(natural_kernel(d), {z1, z2});
            if (!admissible_check(km, fam).admissible)
                continue;
            const double bound = kernel_distance_bound(km, 0, 1);
            for (const auto& f : fam)
                EXPECT_LE(mobius_distance(f(z1), f(z2)), bound + 1e-9) << d.tag();
        }
    }
}
