#include <gtest/gtest.h>

#include "schur_agler/domains.hpp"
#include "schur_agler/sampling.hpp"

using namespace schur_agler;

namespace {

/// Both roots of x^2 - s x + p in the open disc (the parametrization of G).
bool g_by_roots(Complex s, Complex p)
{
    const Complex r = std::sqrt(s * s - 4.0 * p);
    return std::abs(0.5 * (s + r)) < 1.0 && std::abs(0.5 * (s - r)) < 1.0;
}

/// Largest root modulus, used to stay away from the boundary of G.
double g_root_radius(Complex s, Complex p)
{
    const Complex r = std::sqrt(s * s - 4.0 * p);
    return std::max(std::abs(0.5 * (s + r)), std::abs(0.5 * (s - r)));
}

DomainPoint g_point(Complex a, Complex b)
{
    return DomainPoint(Domain::symmetrized_bidisc(), CVector{{a + b, a * b}});
}

} // namespace

TEST(Mobius, Examples)
{
    EXPECT_DOUBLE_EQ(mobius_distance(0.3, 0.3), 0.0);
    EXPECT_DOUBLE_EQ(mobius_distance(0.0, 0.5), 0.5);
    EXPECT_NEAR(mobius_distance(0.5, -0.5), 0.8, 1e-15);
    EXPECT_THROW(mobius_distance(1.0, 0.0), InputError);
    EXPECT_THROW(mobius_distance(0.0, Complex(0.8, 0.8)), InputError);
}

TEST(Mobius, SymmetricAndAutomorphismInvariant)
{
    sampling::Rng rng(1);
    for (int k = 0; k < 200; ++k)
    {
        const Complex a = sampling::disc_point(rng), b = sampling::disc_point(rng);
        const Complex c = sampling::disc_point(rng);
        const Complex l = std::polar(1.0, sampling::uniform(rng, 0.0, 6.28));
        EXPECT_NEAR(mobius_distance(a, b), mobius_distance(b, a), 1e-15);
        EXPECT_NEAR(mobius_distance(disc_automorphism(l, c, a), disc_automorphism(l, c, b)),
                    mobius_distance(a, b), 1e-12);
    }
}

TEST(DomainContains, OriginOfG)
{
    EXPECT_TRUE(domain_contains(CVector::Zero(2), Domain::symmetrized_bidisc()));
}

TEST(DomainContains, ParametrizationImagesAreInG)
{
    sampling::Rng rng(2);
    for (int k = 0; k < 10000; ++k)
    {
        const Complex a = sampling::disc_point(rng, 0.999999);
        const Complex b = sampling::disc_point(rng, 0.999999);
        ASSERT_TRUE(domain_contains(CVector{{a + b, a * b}}, Domain::symmetrized_bidisc()))
            << a << " " << b;
    }
}

TEST(DomainContains, FarPointNotInG)
{
    EXPECT_FALSE(domain_contains(CVector{{2.5, 0.0}}, Domain::symmetrized_bidisc()));
}

TEST(DomainContains, GPredicateAgreesWithRootOracleOnDenseScan)
{
    // Grid over |Re s|, |Im s| <= 2.2 and |Re p|, |Im p| <= 1.1 in a 4-d lattice,
    // skipping points within 1e-9 of the boundary.
    const Domain g = Domain::symmetrized_bidisc();
    const int n    = 15;
    int inside = 0, checked = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                {
                    const Complex s(-2.2 + 4.4 * a / (n - 1), -2.2 + 4.4 * b / (n - 1));
                    const Complex p(-1.1 + 2.2 * c / (n - 1), -1.1 + 2.2 * d / (n - 1));
                    if (std::abs(g_root_radius(s, p) - 1.0) < 1e-9)
                    {
                        continue;
                    }
                    ++checked;
                    const bool expected = g_by_roots(s, p);
                    inside += expected;
                    ASSERT_EQ(domain_contains(CVector{{s, p}}, g), expected) << s << " " << p;
                }
    EXPECT_GT(inside, 0);
    EXPECT_GT(checked, 40000);
}

TEST(DomainContains, DiscPolydiscBall)
{
    EXPECT_TRUE(domain_contains(CVector{{Complex(0.6, 0.7)}}, Domain::disc()));
    EXPECT_FALSE(domain_contains(CVector{{1.0}}, Domain::disc()));
    EXPECT_TRUE(domain_contains(CVector{{0.9, Complex(0, -0.9)}}, Domain::polydisc(2)));
    EXPECT_FALSE(domain_contains(CVector{{0.9, Complex(0, -0.9)}}, Domain::ball(2)));
    EXPECT_TRUE(domain_contains(CVector{{0.5, 0.5, 0.5}}, Domain::ball(3)));
    EXPECT_THROW(domain_contains(CVector{{0.1, 0.1}}, Domain::disc()), InputError);
}

TEST(DomainPoint, RejectsOutsidePoints)
{
    EXPECT_THROW(DomainPoint(Domain::ball(2), CVector{{0.8, 0.8}}), InputError);
    EXPECT_THROW(DomainPoint(Domain::disc(), CVector{{0.1, 0.2}}), InputError);
}

TEST(DomainTag, ParseRoundTrip)
{
    for (const auto& d : {Domain::disc(), Domain::polydisc(3), Domain::symmetrized_bidisc(), Domain::ball(2)})
    {
        EXPECT_EQ(Domain::parse(d.tag()), d);
    }
    EXPECT_THROW(Domain::parse("ball(x)"), InputError);
    EXPECT_THROW(Domain::parse("annulus"), InputError);
    EXPECT_THROW(Domain::parse("polydisc(0)"), InputError);
}

TEST(Caratheodory, BallFromOrigin)
{
    const Domain b3 = Domain::ball(3);
    const double r  = 0.63;
    const auto res  = caratheodory_distance(b3, DomainPoint::origin(b3),
                                            DomainPoint(b3, CVector{{r, 0.0, 0.0}}));
    EXPECT_NEAR(res.value, r, 1e-15);
    EXPECT_EQ(res.extremal.kind(), TestKind::ball_functional);
}

TEST(Caratheodory, PolydiscMaxCoordinate)
{
    const Domain d = Domain::polydisc(2);
    const auto res = caratheodory_distance(d, DomainPoint::origin(d), DomainPoint(d, CVector{{0.3, 0.7}}));
    EXPECT_NEAR(res.value, 0.7, 1e-15);
    EXPECT_EQ(res.extremal.kind(), TestKind::coordinate);
    EXPECT_EQ(res.extremal.coordinate_index(), 2);
}

TEST(Caratheodory, DiscIsMobius)
{
    const auto res = caratheodory_distance(Domain::disc(), DomainPoint::disc(0.5), DomainPoint::disc(-0.5));
    EXPECT_NEAR(res.value, 0.8, 1e-15);
    EXPECT_EQ(res.extremal.kind(), TestKind::identity);
}

TEST(Caratheodory, GFromOriginMatchesClosedForm)
{
    // c*(0, (s, p)) = (2|s - conj(s) p| + |s^2 - 4p|) / (4 - |s|^2).
    sampling::Rng rng(3);
    const Domain g = Domain::symmetrized_bidisc();
    for (int k = 0; k < 50; ++k)
    {
        const auto z    = g_point(sampling::disc_point(rng), sampling::disc_point(rng));
        const Complex s = z[0], p = z[1];
        const double closed =
            (2.0 * std::abs(s - std::conj(s) * p) + std::abs(s * s - 4.0 * p)) / (4.0 - std::norm(s));
        const auto res = caratheodory_distance(g, DomainPoint::origin(g), z);
        EXPECT_NEAR(res.value, closed, 1e-9) << s << " " << p;
        ASSERT_TRUE(res.argmax_parameter.has_value());
    }
}

TEST(Caratheodory, GDiagonalDominatesRandomSchurCandidates)
{
    // Candidates f = sum_k c_k (s/2)^a_k p^b_k with sum |c_k| <= 1 are Schur on G
    // (|s/2| < 1 and |p| < 1 there); so are Phi_t for |t| <= 1. None may beat
    // the computed c* between pi(0,0) and pi(r,r).
    const Domain g = Domain::symmetrized_bidisc();
    const double r = 0.6;
    const auto z1  = DomainPoint::origin(g);
    const auto z2  = g_point(r, r);
    const double c = caratheodory_distance(g, z1, z2).value;

    sampling::Rng rng(4);
    const Complex h = z2[0] / 2.0, p = z2[1];
    std::array<Complex, 16> mono; // (s/2)^a p^b, a, b < 4, at z2
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            mono[static_cast<std::size_t>(4 * a + b)] = std::pow(h, a) * std::pow(p, b);

    double best = 0.0;
    for (int k = 0; k < 1000000; ++k)
    {
        std::array<Complex, 16> coef;
        double l1 = 0.0;
        const int terms = 1 + k % 4;
        coef.fill(0.0);
        for (int t = 0; t < terms; ++t)
        {
            const std::size_t idx = static_cast<std::size_t>(sampling::uniform(rng, 0.0, 15.999));
            coef[idx] += sampling::gaussian(rng);
        }
        for (const auto& x : coef)
            l1 += std::abs(x);
        const double scale = sampling::uniform(rng, 0.5, 1.0) / l1;
        Complex f1 = coef[0] * scale, f2 = 0.0;
        for (std::size_t i = 0; i < 16; ++i)
            f2 += coef[i] * scale * mono[i];
        best = std::max(best, mobius_distance(f1, f2));
    }
    for (int k = 0; k < 1000; ++k)
    {
        const auto t = TestFunction::sym_bidisc(sampling::disc_point(rng, 1.0));
        best         = std::max(best, mobius_distance(t(z1), t(z2)));
    }
    EXPECT_LE(best, c + 1e-12);
    EXPECT_GT(best, 0.5 * c); // the sample is not degenerate
}

TEST(Caratheodory, SymmetricInArguments)
{
    sampling::Rng rng(5);
    for (const auto& d : {Domain::disc(), Domain::polydisc(3), Domain::symmetrized_bidisc(), Domain::ball(2)})
    {
        for (int k = 0; k < 10; ++k)
        {
            const auto a = sampling::point(rng, d), b = sampling::point(rng, d);
            EXPECT_NEAR(caratheodory_distance(d, a, b).value, caratheodory_distance(d, b, a).value, 1e-10)
                << d.tag();
        }
    }
}

TEST(Caratheodory, ExtremalAttainsValue)
{
    sampling::Rng rng(6);
    for (const auto& d : {Domain::disc(), Domain::polydisc(2), Domain::symmetrized_bidisc(), Domain::ball(3)})
    {
        const double tol = d.kind == DomainKind::symmetrized_bidisc ? 1e-6 : 1e-8;
        for (int k = 0; k < 10; ++k)
        {
            const auto a   = sampling::point(rng, d), b = sampling::point(rng, d);
            const auto res = caratheodory_distance(d, a, b);
            EXPECT_NEAR(mobius_distance(res.extremal(a), res.extremal(b)), res.value, tol) << d.tag();
        }
    }
}

TEST(Caratheodory, RejectsForeignPoints)
{
    EXPECT_THROW(caratheodory_distance(Domain::ball(2), DomainPoint::disc(0.1), DomainPoint::disc(0.2)),
                 InputError);
}

TEST(TestFamilies, FullFamilySupEqualsDistance)
{
    sampling::Rng rng(7);
    for (const auto& d : {Domain::disc(), Domain::polydisc(2), Domain::symmetrized_bidisc(), Domain::ball(2)})
    {
        const auto fam = TestFamily::full(d);
        for (int k = 0; k < 10; ++k)
        {
            const auto a = sampling::point(rng, d), b = sampling::point(rng, d);
            EXPECT_NEAR(fam.sup(a, b).value, caratheodory_distance(d, a, b).value, 1e-8) << d.tag();
        }
    }
}

TEST(TestFamilies, DeficientBidiscFamilyHasGap)
{
    const Domain d = Domain::polydisc(2);
    const auto fam = TestFamily::finite({TestFunction::coordinate(2, 1)});
    const DomainPoint a(d, CVector{{0.0, 0.0}}), b(d, CVector{{0.0, 0.5}});
    EXPECT_GE(caratheodory_distance(d, a, b).value - fam.sup(a, b).value, 0.1);
}

TEST(TestFamilies, BallFunctionalFamilyAttainsDistance)
{
    sampling::Rng rng(8);
    const Domain d = Domain::ball(3);
    const auto fam = TestFamily::ball_functionals(3);
    for (int k = 0; k < 100; ++k)
    {
        const auto a = sampling::point(rng, d), b = sampling::point(rng, d);
        EXPECT_NEAR(fam.sup(a, b).value, caratheodory_distance(d, a, b).value, 1e-8);
    }
}

TEST(EvalTest, Examples)
{
    const DomainPoint g(Domain::symmetrized_bidisc(), CVector{{Complex(0.4, 0.2), 0.1}});
    EXPECT_NEAR(std::abs(eval_test(TestFunction::sym_bidisc(0.0), g) - (-g[0] / 2.0)), 0.0, 1e-16);
    const DomainPoint q(Domain::polydisc(2), CVector{{0.3, 0.7}});
    EXPECT_DOUBLE_EQ(eval_test(TestFunction::coordinate(2, 1), q).real(), 0.3);
    EXPECT_THROW(TestFunction::sym_bidisc(1.5), InputError);
    EXPECT_THROW(TestFunction::coordinate(2, 3), InputError);
    EXPECT_THROW(eval_test(TestFunction::identity(), q), InputError);
}

TEST(EvalTest, BallFunctionalAttainsDistanceAtZ2)
{
    sampling::Rng rng(9);
    const Domain d = Domain::ball(2);
    for (int k = 0; k < 20; ++k)
    {
        const CVector z1 = sampling::ball_point(rng, 2), z2 = sampling::ball_point(rng, 2);
        const CVector v  = ball_automorphism(z1, z2);
        const auto f     = TestFunction::ball_functional(z1, v.normalized(), z1);
        const Complex w  = f(DomainPoint(d, z2));
        EXPECT_NEAR(w.real(), ball_distance(z1, z2), 1e-12);
        EXPECT_NEAR(w.imag(), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(f(DomainPoint(d, z1))), 0.0, 1e-15);
    }
}

TEST(EvalTest, VanishesAtBasepointAndMapsIntoDisc)
{
    sampling::Rng rng(10);
    const Domain b = Domain::ball(2);
    const auto f   = TestFunction::ball_functional(sampling::ball_point(rng, 2),
                                                   CVector{{0.6, Complex(0, 0.8)}});
    EXPECT_NEAR(std::abs(f(DomainPoint::origin(b))), 0.0, 1e-15);
    const auto t = TestFunction::sym_bidisc(Complex(0.3, -0.9));
    EXPECT_NEAR(std::abs(t(DomainPoint::origin(Domain::symmetrized_bidisc()))), 0.0, 1e-16);
    for (int k = 0; k < 1000; ++k)
    {
        EXPECT_LT(std::abs(f(sampling::point(rng, b, 0.9999))), 1.0);
        EXPECT_LT(std::abs(t(sampling::point(rng, Domain::symmetrized_bidisc(), 0.9999))), 1.0);
    }
}

TEST(EVector, ZeroAtBasepoint)
{
    const auto fam = TestFamily::full(Domain::polydisc(3)).members();
    EXPECT_EQ(e_vector(fam, DomainPoint::origin(Domain::polydisc(3))).cwiseAbs().maxCoeff(), 0.0);
    const auto sym = TestFamily::sym_bidisc().truncation(16);
    EXPECT_EQ(e_vector(sym, DomainPoint::origin(Domain::symmetrized_bidisc())).cwiseAbs().maxCoeff(), 0.0);
}

TEST(EVector, PolydiscCoordinates)
{
    const auto fam = TestFamily::full(Domain::polydisc(2)).members();
    const auto e   = e_vector(fam, DomainPoint(Domain::polydisc(2), CVector{{0.3, Complex(0, 0.7)}}));
    EXPECT_EQ(e[0], Complex(0.3));
    EXPECT_EQ(e[1], Complex(0, 0.7));
    EXPECT_THROW(e_vector(std::vector<TestFunction>{}, DomainPoint::disc(0.0)), InputError);
}

TEST(EVector, SymBidiscTruncationApproachesDistance)
{
    const Domain g = Domain::symmetrized_bidisc();
    const auto z   = g_point(Complex(0.5, 0.3), Complex(-0.2, 0.6));
    const double c = caratheodory_distance(g, DomainPoint::origin(g), z).value;
    const double coarse = e_vector(TestFamily::sym_bidisc().truncation(64), z).cwiseAbs().maxCoeff();
    const double fine   = e_vector(TestFamily::sym_bidisc().truncation(4096), z).cwiseAbs().maxCoeff();
    EXPECT_LT(coarse, 1.0);
    EXPECT_LE(coarse, c + 1e-12);
    EXPECT_LE(fine, c + 1e-12);
    EXPECT_LE(c - fine, c - coarse + 1e-15);
    EXPECT_LT(c - fine, 1e-5);
}

TEST(BallAutomorphism, OriginIsNegation)
{
    const CVector z{{0.2, Complex(0.1, -0.4)}};
    EXPECT_LT((ball_automorphism(CVector::Zero(2), z) + z).norm(), 1e-16);
}

TEST(BallAutomorphism, ExchangesAAndZeroAndIsInvolution)
{
    sampling::Rng rng(11);
    for (int k = 0; k < 100; ++k)
    {
        const CVector a = sampling::ball_point(rng, 3), z = sampling::ball_point(rng, 3);
        EXPECT_LT(ball_automorphism(a, a).norm(), 1e-15);
        EXPECT_LT((ball_automorphism(a, ball_automorphism(a, z)) - z).norm(), 1e-12);
    }
}

TEST(BallAutomorphism, PreservesDistance)
{
    sampling::Rng rng(12);
    const Domain b = Domain::ball(2);
    for (int k = 0; k < 100; ++k)
    {
        const CVector a = sampling::ball_point(rng, 2), z = sampling::ball_point(rng, 2),
                      w = sampling::ball_point(rng, 2);
        const double before = caratheodory_distance(b, DomainPoint(b, z), DomainPoint(b, w)).value;
        const double after  = caratheodory_distance(b, DomainPoint(b, ball_automorphism(a, z)),
                                                    DomainPoint(b, ball_automorphism(a, w)))
                                 .value;
        EXPECT_NEAR(before, after, 1e-10);
    }
}

TEST(BallAutomorphism, RejectsBoundaryCentre)
{
    EXPECT_THROW(ball_automorphism(CVector{{1.0, 0.0}}, CVector::Zero(2)), InputError);
}
