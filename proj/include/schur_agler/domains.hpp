///
/// \file domains.hpp
///
/// Model domains (disc, polydisc, symmetrized bidisc, Euclidean ball), the
/// pseudohyperbolic distance on the disc, Caratheodory distances with their
/// extremal functions, and the test-function families built from them.
///

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "schur_agler/numerics.hpp"

namespace schur_agler {

enum class DomainKind
{
    disc,
    polydisc,
    symmetrized_bidisc,
    ball,
};

struct Domain
{
    DomainKind kind = DomainKind::disc;
    int dim         = 1;

    static Domain disc() { return {DomainKind::disc, 1}; }
    static Domain symmetrized_bidisc() { return {DomainKind::symmetrized_bidisc, 2}; }

    static Domain polydisc(int m)
    {
        if (m < 1)
        {
            throw InputError("polydisc dimension must be at least 1");
        }
        return {DomainKind::polydisc, m};
    }

    static Domain ball(int m)
    {
        if (m < 1)
        {
            throw InputError("ball dimension must be at least 1");
        }
        return {DomainKind::ball, m};
    }

    Index coordinate_count() const { return dim; }

    std::string tag() const
    {
        switch (kind)
        {
        case DomainKind::disc:
            return "disc";
        case DomainKind::polydisc:
            return "polydisc(" + std::to_string(dim) + ")";
        case DomainKind::symmetrized_bidisc:
            return "symmetrized_bidisc";
        case DomainKind::ball:
            return "ball(" + std::to_string(dim) + ")";
        }
        return "?";
    }

    /// Inverse of tag(): "disc", "polydisc(m)", "symmetrized_bidisc", "ball(m)".
    static Domain parse(const std::string& s)
    {
        auto dim_of = [&](const std::string& prefix) {
            const auto close = s.find(')');
            if (close == std::string::npos || close != s.size() - 1)
            {
                throw InputError("malformed domain tag '" + s + "'");
            }
            const std::string digits = s.substr(prefix.size(), close - prefix.size());
            if (digits.empty() ||
                !std::all_of(digits.begin(), digits.end(), ::isdigit))
            {
                throw InputError("malformed domain tag '" + s + "'");
            }
            return std::stoi(digits);
        };
        if (s == "disc")
        {
            return disc();
        }
        if (s == "symmetrized_bidisc")
        {
            return symmetrized_bidisc();
        }
        if (s.rfind("polydisc(", 0) == 0)
        {
            return polydisc(dim_of("polydisc("));
        }
        if (s.rfind("ball(", 0) == 0)
        {
            return ball(dim_of("ball("));
        }
        throw InputError("unknown domain tag '" + s + "'");
    }

    friend bool operator==(const Domain&, const Domain&) = default;
};

/// Membership predicate. The symmetrized bidisc uses |s - conj(s) p| < 1 - |p|^2.
inline bool domain_contains(const CVector& coords, const Domain& d)
{
    if (coords.size() != d.coordinate_count())
    {
        throw InputError("domain_contains: coordinate count " +
                         std::to_string(coords.size()) + " does not match " +
                         d.tag());
    }
    if (!coords.allFinite())
    {
        return false;
    }
    switch (d.kind)
    {
    case DomainKind::disc:
    case DomainKind::polydisc:
        return coords.cwiseAbs().maxCoeff() < 1.0;
    case DomainKind::ball:
        return coords.squaredNorm() < 1.0;
    case DomainKind::symmetrized_bidisc: {
        const Complex s = coords[0];
        const Complex p = coords[1];
        return std::abs(s - std::conj(s) * p) < 1.0 - std::norm(p);
    }
    }
    return false;
}

class DomainPoint
{
public:
    DomainPoint(Domain d, CVector coords) : m_domain(d), m_coords(std::move(coords))
    {
        if (!domain_contains(m_coords, m_domain))
        {
            throw InputError("point lies outside " + m_domain.tag());
        }
    }

    static DomainPoint origin(const Domain& d)
    {
        return DomainPoint(d, CVector::Zero(d.coordinate_count()));
    }

    static DomainPoint disc(Complex z) { return DomainPoint(Domain::disc(), CVector::Constant(1, z)); }

    const Domain& domain() const noexcept { return m_domain; }
    const CVector& coords() const noexcept { return m_coords; }
    Complex operator[](Index i) const { return m_coords[i]; }

    friend bool operator==(const DomainPoint& a, const DomainPoint& b)
    {
        return a.m_domain == b.m_domain && a.m_coords == b.m_coords;
    }

private:
    Domain m_domain;
    CVector m_coords;
};

/// |a - b| / |1 - a conj(b)| on the open unit disc.
inline double mobius_distance(Complex a, Complex b)
{
    if (!(std::abs(a) < 1.0) || !(std::abs(b) < 1.0))
    {
        throw InputError("mobius_distance: arguments must lie in the open unit disc");
    }
    return std::abs(a - b) / std::abs(1.0 - a * std::conj(b));
}

/// Involutive automorphism of the ball exchanging a and 0:
/// phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>), s_a = sqrt(1 - |a|^2).
inline CVector ball_automorphism(const CVector& a, const CVector& z)
{
    if (a.size() != z.size())
    {
        throw InputError("ball_automorphism: dimension mismatch");
    }
    const double aa = a.squaredNorm();
    if (!(aa < 1.0))
    {
        throw InputError("ball_automorphism: centre must lie in the open ball");
    }
    if (!(z.squaredNorm() < 1.0))
    {
        throw InputError("ball_automorphism: point must lie in the open ball");
    }
    if (aa == 0.0)
    {
        return -z;
    }
    const Complex za   = inner(z, a);
    const CVector proj = (za / aa) * a;
    const CVector orth = z - proj;
    return (a - proj - std::sqrt(1.0 - aa) * orth) / (1.0 - za);
}

/// z -> lambda (z - a) / (1 - conj(a) z), |lambda| = 1.
inline Complex disc_automorphism(Complex lambda, Complex a, Complex z)
{
    if (!(std::abs(a) < 1.0))
    {
        throw InputError("disc_automorphism: a must lie in the open unit disc");
    }
    return lambda * (z - a) / (1.0 - std::conj(a) * z);
}

/// Automorphism of the polydisc: a coordinate permutation followed by a disc
/// automorphism in every coordinate. Output coordinate j is
/// disc_automorphism(rotations[j], centers[j], z[permutation[j]]).
struct PolydiscAutomorphism
{
    std::vector<int> permutation; // 0-based
    std::vector<Complex> rotations;
    std::vector<Complex> centers;

    CVector operator()(const CVector& z) const
    {
        const std::size_t m = permutation.size();
        if (static_cast<std::size_t>(z.size()) != m || rotations.size() != m || centers.size() != m)
        {
            throw InputError("PolydiscAutomorphism: dimension mismatch");
        }
        CVector out(z.size());
        for (std::size_t j = 0; j < m; ++j)
        {
            out[static_cast<Index>(j)] =
                disc_automorphism(rotations[j], centers[j], z[permutation[j]]);
        }
        return out;
    }
};

/// sqrt(1 - (1 - |z|^2)(1 - |w|^2) / |1 - <z, w>|^2)
inline double ball_distance(const CVector& z, const CVector& w)
{
    const double num = (1.0 - z.squaredNorm()) * (1.0 - w.squaredNorm());
    const double den = std::norm(1.0 - inner(z, w));
    return std::sqrt(std::clamp(1.0 - num / den, 0.0, 1.0));
}

//------------------------------------------------------------------------------
// Test functions
//------------------------------------------------------------------------------

enum class TestKind
{
    identity,
    coordinate,
    sym_bidisc_param,
    ball_functional,
};

/// A single test function together with the point w0 where it vanishes.
///
///  - identity:         z on the disc
///  - coordinate(j):    z_j on the polydisc (1-based j)
///  - sym_bidisc(t):    (s, p) -> (2 t p - s) / (2 - t s), |t| <= 1
///  - ball_functional:  z -> M(<phi_a(z), u>) where M is the disc automorphism
///                      (x - c) / (1 - conj(c) x), c = <phi_a(w0), u>, so the
///                      function vanishes at w0 (and equals <phi_a(z), u>
///                      when w0 = a)
class TestFunction
{
public:
    static TestFunction identity()
    {
        TestFunction t(TestKind::identity, Domain::disc());
        return t;
    }

    static TestFunction coordinate(int m, int j)
    {
        if (j < 1 || j > m)
        {
            throw InputError("coordinate index " + std::to_string(j) +
                             " outside 1.." + std::to_string(m));
        }
        TestFunction t(TestKind::coordinate, Domain::polydisc(m));
        t.m_coordinate = j;
        return t;
    }

    static TestFunction sym_bidisc(Complex param)
    {
        if (!(std::abs(param) <= 1.0 + 1e-12))
        {
            throw InputError("symmetrized-bidisc parameter must lie in the closed unit disc");
        }
        TestFunction t(TestKind::sym_bidisc_param, Domain::symmetrized_bidisc());
        t.m_param = param;
        return t;
    }

    static TestFunction ball_functional(const CVector& center, const CVector& direction,
                                        std::optional<CVector> basepoint = std::nullopt)
    {
        const int m = static_cast<int>(center.size());
        if (m < 1 || direction.size() != m)
        {
            throw InputError("ball functional: dimension mismatch");
        }
        if (!(center.squaredNorm() < 1.0))
        {
            throw InputError("ball functional: centre must lie in the open ball");
        }
        if (std::abs(direction.norm() - 1.0) > 1e-9)
        {
            throw InputError("ball functional: direction must be a unit vector");
        }
        TestFunction t(TestKind::ball_functional, Domain::ball(m));
        t.m_center    = center;
        t.m_direction = direction.normalized();
        t.m_basepoint = basepoint.value_or(CVector::Zero(m));
        if (t.m_basepoint.size() != m || !(t.m_basepoint.squaredNorm() < 1.0))
        {
            throw InputError("ball functional: basepoint must lie in the ball");
        }
        t.m_base_value = inner(ball_automorphism(t.m_center, t.m_basepoint), t.m_direction);
        return t;
    }

    TestKind kind() const noexcept { return m_kind; }
    const Domain& domain() const noexcept { return m_domain; }
    int coordinate_index() const noexcept { return m_coordinate; }
    Complex parameter() const noexcept { return m_param; }
    const CVector& center() const noexcept { return m_center; }
    const CVector& direction() const noexcept { return m_direction; }

    DomainPoint basepoint() const
    {
        if (m_kind == TestKind::ball_functional)
        {
            return DomainPoint(m_domain, m_basepoint);
        }
        return DomainPoint::origin(m_domain);
    }

    Complex operator()(const DomainPoint& z) const
    {
        if (!(z.domain() == m_domain))
        {
            throw InputError("test function on " + m_domain.tag() +
                             " evaluated at a point of " + z.domain().tag());
        }
        const CVector& c = z.coords();
        switch (m_kind)
        {
        case TestKind::identity:
            return c[0];
        case TestKind::coordinate:
            return c[m_coordinate - 1];
        case TestKind::sym_bidisc_param:
            return (2.0 * m_param * c[1] - c[0]) / (2.0 - m_param * c[0]);
        case TestKind::ball_functional: {
            const Complex raw = inner(ball_automorphism(m_center, c), m_direction);
            return (raw - m_base_value) / (1.0 - std::conj(m_base_value) * raw);
        }
        }
        return 0.0;
    }

    std::string describe() const
    {
        switch (m_kind)
        {
        case TestKind::identity:
            return "identity";
        case TestKind::coordinate:
            return "coordinate(" + std::to_string(m_coordinate) + ")";
        case TestKind::sym_bidisc_param:
            return "sym_bidisc_param";
        case TestKind::ball_functional:
            return "ball_functional";
        }
        return "?";
    }

private:
    TestFunction(TestKind k, Domain d) : m_kind(k), m_domain(d) {}

    TestKind m_kind;
    Domain m_domain;
    int m_coordinate = 0;
    Complex m_param  = 0.0;
    CVector m_center;
    CVector m_direction;
    CVector m_basepoint;
    Complex m_base_value = 0.0;
};

inline Complex eval_test(const TestFunction& t, const DomainPoint& z) { return t(z); }

/// Finite-family evaluation E(z) = (psi_1(z), ..., psi_n(z)).
inline CVector e_vector(std::span<const TestFunction> family, const DomainPoint& z)
{
    if (family.empty())
    {
        throw InputError("e_vector: empty test family");
    }
    CVector e(static_cast<Index>(family.size()));
    for (std::size_t k = 0; k < family.size(); ++k)
    {
        e[static_cast<Index>(k)] = family[k](z);
    }
    return e;
}

//------------------------------------------------------------------------------
// Symmetrized bidisc extremal search
//------------------------------------------------------------------------------

struct SymBidiscSearch
{
    int boundary_angles = 4096;
    int interior_grid   = 64;
    double golden_tol   = 1e-10;
    int refined_peaks   = 8;
};

struct SymBidiscSup
{
    double value;
    Complex parameter;
};

/// sup over |t| <= 1 of m(Phi_t(l1), Phi_t(l2)): boundary-circle grid, golden
/// section on the best local peaks, and an interior grid as a safeguard.
/// Ties go to the smaller angle in [0, 2pi), then the smaller modulus.
inline SymBidiscSup sym_bidisc_sup(const CVector& l1, const CVector& l2,
                                   const SymBidiscSearch& opt = {})
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    auto at = [&](Complex t) {
        const Complex a = (2.0 * t * l1[1] - l1[0]) / (2.0 - t * l1[0]);
        const Complex b = (2.0 * t * l2[1] - l2[0]) / (2.0 - t * l2[0]);
        return std::abs(a - b) / std::abs(1.0 - a * std::conj(b));
    };
    auto on_circle = [&](double theta) { return at(std::polar(1.0, theta)); };

    auto better = [](double v, Complex t, const SymBidiscSup& cur) {
        if (v != cur.value)
        {
            return v > cur.value;
        }
        auto angle = [](Complex z) {
            const double a = std::arg(z);
            return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
        };
        if (angle(t) != angle(cur.parameter))
        {
            return angle(t) < angle(cur.parameter);
        }
        return std::abs(t) < std::abs(cur.parameter);
    };

    const int n = std::max(opt.boundary_angles, 3);
    std::vector<double> values(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
    {
        values[static_cast<std::size_t>(k)] = on_circle(two_pi * k / n);
    }

    SymBidiscSup best{-1.0, Complex(1.0, 0.0)};
    std::vector<int> peaks;
    for (int k = 0; k < n; ++k)
    {
        const double v = values[static_cast<std::size_t>(k)];
        const double l = values[static_cast<std::size_t>((k + n - 1) % n)];
        const double r = values[static_cast<std::size_t>((k + 1) % n)];
        if (v >= l && v >= r)
        {
            peaks.push_back(k);
        }
        if (better(v, std::polar(1.0, two_pi * k / n), best))
        {
            best = {v, std::polar(1.0, two_pi * k / n)};
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(), [&](int a, int b) {
        return values[static_cast<std::size_t>(a)] > values[static_cast<std::size_t>(b)];
    });
    if (static_cast<int>(peaks.size()) > opt.refined_peaks)
    {
        peaks.resize(static_cast<std::size_t>(opt.refined_peaks));
    }

    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int k : peaks)
    {
        double lo = two_pi * (k - 1) / n;
        double hi = two_pi * (k + 1) / n;
        double x1 = hi - invphi * (hi - lo);
        double x2 = lo + invphi * (hi - lo);
        double f1 = on_circle(x1);
        double f2 = on_circle(x2);
        while (hi - lo > opt.golden_tol)
        {
            if (f1 < f2)
            {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + invphi * (hi - lo);
                f2 = on_circle(x2);
            }
            else
            {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - invphi * (hi - lo);
                f1 = on_circle(x1);
            }
        }
        double theta = std::fmod(0.5 * (lo + hi) + two_pi, two_pi);
        const Complex t = std::polar(1.0, theta);
        const double v  = at(t);
        if (better(v, t, best))
        {
            best = {v, t};
        }
    }

    const int g = opt.interior_grid;
    for (int i = 0; i < g; ++i)
    {
        for (int j = 0; j < g; ++j)
        {
            const Complex t(-1.0 + (2.0 * i + 1.0) / g, -1.0 + (2.0 * j + 1.0) / g);
            if (std::abs(t) >= 1.0)
            {
                continue;
            }
            const double v = at(t);
            if (better(v, t, best))
            {
                best = {v, t};
            }
        }
    }
    return best;
}

//------------------------------------------------------------------------------
// Caratheodory distance
//------------------------------------------------------------------------------

struct DistanceResult
{
    double value = 0.0;
    TestFunction extremal;
    std::optional<Complex> argmax_parameter;
};

namespace detail {

inline CVector ball_extremal_direction(const CVector& z1, const CVector& z2)
{
    const CVector v = ball_automorphism(z1, z2);
    const double nv = v.norm();
    if (nv == 0.0)
    {
        CVector e = CVector::Zero(z1.size());
        e[0]      = 1.0;
        return e;
    }
    return v / nv;
}

inline void require_in(const Domain& d, const DomainPoint& z, const char* what)
{
    if (!(z.domain() == d))
    {
        throw InputError(std::string(what) + " is a point of " + z.domain().tag() +
                         ", expected " + d.tag());
    }
}

} // namespace detail

inline DistanceResult caratheodory_distance(const Domain& d, const DomainPoint& z1,
                                            const DomainPoint& z2,
                                            const SymBidiscSearch& search = {})
{
    detail::require_in(d, z1, "z1");
    detail::require_in(d, z2, "z2");
    switch (d.kind)
    {
    case DomainKind::disc:
        return {mobius_distance(z1[0], z2[0]), TestFunction::identity(), std::nullopt};
    case DomainKind::polydisc: {
        int best_j    = 1;
        double best_v = -1.0;
        for (int j = 1; j <= d.dim; ++j)
        {
            const double v = mobius_distance(z1[j - 1], z2[j - 1]);
            if (v > best_v)
            {
                best_v = v;
                best_j = j;
            }
        }
        return {best_v, TestFunction::coordinate(d.dim, best_j), std::nullopt};
    }
    case DomainKind::symmetrized_bidisc: {
        const auto sup = sym_bidisc_sup(z1.coords(), z2.coords(), search);
        return {sup.value, TestFunction::sym_bidisc(sup.parameter), sup.parameter};
    }
    case DomainKind::ball: {
        const CVector u = detail::ball_extremal_direction(z1.coords(), z2.coords());
        return {ball_distance(z1.coords(), z2.coords()),
                TestFunction::ball_functional(z1.coords(), u, z1.coords()), std::nullopt};
    }
    }
    throw InputError("caratheodory_distance: unsupported domain");
}

//------------------------------------------------------------------------------
// Test families
//------------------------------------------------------------------------------

/// A finite list of test functions, or one of the two continuous families
/// (symmetrized-bidisc parameters on the closed disc; Moebius-normalized ball
/// functionals vanishing at the origin). Continuous families are maximized by
/// a dedicated search and truncated to finite grids when a finite E(z) is
/// needed.
class TestFamily
{
public:
    enum class Kind
    {
        finite,
        sym_bidisc_continuum,
        ball_functionals,
    };

    struct Sup
    {
        double value;
        TestFunction member;
    };

    static TestFamily finite(std::vector<TestFunction> members)
    {
        if (members.empty())
        {
            throw InputError("test family must not be empty");
        }
        const Domain d = members.front().domain();
        for (const auto& t : members)
        {
            if (!(t.domain() == d))
            {
                throw InputError("test family mixes domains");
            }
        }
        TestFamily f(Kind::finite, d);
        f.m_members = std::move(members);
        return f;
    }

    static TestFamily sym_bidisc(SymBidiscSearch search = {})
    {
        TestFamily f(Kind::sym_bidisc_continuum, Domain::symmetrized_bidisc());
        f.m_search = search;
        return f;
    }

    static TestFamily ball_functionals(int m)
    {
        return TestFamily(Kind::ball_functionals, Domain::ball(m));
    }

    /// The family whose sup reproduces the Caratheodory distance on d.
    static TestFamily full(const Domain& d)
    {
        switch (d.kind)
        {
        case DomainKind::disc:
            return finite({TestFunction::identity()});
        case DomainKind::polydisc: {
            std::vector<TestFunction> coords;
            for (int j = 1; j <= d.dim; ++j)
            {
                coords.push_back(TestFunction::coordinate(d.dim, j));
            }
            return finite(std::move(coords));
        }
        case DomainKind::symmetrized_bidisc:
            return sym_bidisc();
        case DomainKind::ball:
            return ball_functionals(d.dim);
        }
        throw InputError("unsupported domain");
    }

    Kind kind() const noexcept { return m_kind; }
    const Domain& domain() const noexcept { return m_domain; }
    const std::vector<TestFunction>& members() const noexcept { return m_members; }

    /// Finite members: the list itself, or `count` equally spaced boundary
    /// parameters for the symmetrized bidisc.
    std::vector<TestFunction> truncation(int count) const
    {
        switch (m_kind)
        {
        case Kind::finite:
            return m_members;
        case Kind::sym_bidisc_continuum: {
            std::vector<TestFunction> out;
            for (int k = 0; k < count; ++k)
            {
                out.push_back(TestFunction::sym_bidisc(
                    std::polar(1.0, 2.0 * std::numbers::pi * k / count)));
            }
            return out;
        }
        case Kind::ball_functionals:
            break;
        }
        throw InputError("the ball functional family has no canonical truncation");
    }

    Sup sup(const DomainPoint& z1, const DomainPoint& z2) const
    {
        detail::require_in(m_domain, z1, "z1");
        detail::require_in(m_domain, z2, "z2");
        switch (m_kind)
        {
        case Kind::finite: {
            std::optional<Sup> best;
            for (const auto& t : m_members)
            {
                const double v = mobius_distance(t(z1), t(z2));
                if (!best || v > best->value)
                {
                    best = Sup{v, t};
                }
            }
            return *best;
        }
        case Kind::sym_bidisc_continuum: {
            const auto s = sym_bidisc_sup(z1.coords(), z2.coords(), m_search);
            return {s.value, TestFunction::sym_bidisc(s.parameter)};
        }
        case Kind::ball_functionals: {
            // Every member is a Schur function, so m <= c*; the functional
            // centred at z1 pointing at phi_{z1}(z2) attains c*.
            const CVector u = detail::ball_extremal_direction(z1.coords(), z2.coords());
            const auto t    = TestFunction::ball_functional(z1.coords(), u);
            return {mobius_distance(t(z1), t(z2)), t};
        }
        }
        throw InputError("unsupported family");
    }

private:
    TestFamily(Kind k, Domain d) : m_kind(k), m_domain(d) {}

    Kind m_kind;
    Domain m_domain;
    std::vector<TestFunction> m_members;
    SymBidiscSearch m_search;
};

} // namespace schur_agler
