///
/// \file serialization.hpp
///
/// JSON encoding of the library's value types. Complex numbers are [re, im]
/// pairs, matrices are row-major nested arrays, points carry a domain tag.
/// Readers report the offending field through FieldError.
///

#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "schur_agler/da_extremal.hpp"
#include "schur_agler/domains.hpp"
#include "schur_agler/herglotz.hpp"
#include "schur_agler/kernels.hpp"
#include "schur_agler/pick.hpp"
#include "schur_agler/realization.hpp"

namespace schur_agler::io {

using json = nlohmann::json;

//------------------------------------------------------------------------------
// Deterministic output
//------------------------------------------------------------------------------

namespace detail {

inline void dump_double(double v, std::string& out)
{
    if (!std::isfinite(v))
    {
        out += "null";
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

inline void dump_string(const std::string& s, std::string& out)
{
    out += json(s).dump();
}

inline void dump(const json& j, std::string& out, int indent, int depth)
{
    const auto newline = [&](int d) {
        if (indent >= 0)
        {
            out += '\n';
            out.append(static_cast<std::size_t>(indent * d), ' ');
        }
    };
    // Short numeric arrays (complex pairs, small vectors) stay on one line.
    const auto flat = [](const json& a) {
        if (a.size() > 4)
        {
            return false;
        }
        for (const auto& e : a)
        {
            if (!e.is_number())
            {
                return false;
            }
        }
        return true;
    };

    switch (j.type())
    {
    case json::value_t::object: {
        if (j.empty())
        {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it)
        {
            if (!first)
            {
                out += ',';
            }
            first = false;
            newline(depth + 1);
            dump_string(it.key(), out);
            out += indent >= 0 ? ": " : ":";
            dump(it.value(), out, indent, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty())
        {
            out += "[]";
            return;
        }
        const bool one_line = indent < 0 || flat(j);
        out += '[';
        bool first = true;
        for (const auto& e : j)
        {
            if (!first)
            {
                out += one_line && indent >= 0 ? ", " : ",";
            }
            first = false;
            if (!one_line)
            {
                newline(depth + 1);
            }
            dump(e, out, indent, depth + 1);
        }
        if (!one_line)
        {
            newline(depth);
        }
        out += ']';
        return;
    }
    case json::value_t::number_float:
        dump_double(j.get<double>(), out);
        return;
    default:
        out += j.dump();
        return;
    }
}

} // namespace detail

/// Like json::dump but prints every double with 17 significant digits.
inline std::string dump(const json& j, int indent = 2)
{
    std::string out;
    detail::dump(j, out, indent, 0);
    return out;
}

//------------------------------------------------------------------------------
// Field access
//------------------------------------------------------------------------------

inline std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

inline std::string join(const std::string& path, std::size_t index)
{
    return path + "[" + std::to_string(index) + "]";
}

inline const json& require(const json& obj, const std::string& key, const std::string& path)
{
    if (!obj.is_object())
    {
        throw FieldError(path.empty() ? "<root>" : path, "expected an object");
    }
    const auto it = obj.find(key);
    if (it == obj.end())
    {
        throw FieldError(join(path, key), "missing required field");
    }
    return *it;
}

inline double read_double(const json& j, const std::string& path)
{
    if (!j.is_number())
    {
        throw FieldError(path, "expected a number");
    }
    return j.get<double>();
}

inline int read_int(const json& j, const std::string& path)
{
    if (!j.is_number_integer())
    {
        throw FieldError(path, "expected an integer");
    }
    return j.get<int>();
}

inline std::string read_string(const json& j, const std::string& path)
{
    if (!j.is_string())
    {
        throw FieldError(path, "expected a string");
    }
    return j.get<std::string>();
}

inline const json& read_array(const json& j, const std::string& path)
{
    if (!j.is_array())
    {
        throw FieldError(path, "expected an array");
    }
    return j;
}

/// Rewraps library InputErrors raised while building a value from `path`.
template <class F>
auto with_field(const std::string& path, F&& f) -> decltype(f())
{
    try
    {
        return f();
    }
    catch (const FieldError&)
    {
        throw;
    }
    catch (const InputError& e)
    {
        throw FieldError(path, e.what());
    }
}

//------------------------------------------------------------------------------
// Scalars, vectors, matrices
//------------------------------------------------------------------------------

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

/// Accepts [re, im] or a bare real number.
inline Complex read_complex(const json& j, const std::string& path)
{
    if (j.is_number())
    {
        return {j.get<double>(), 0.0};
    }
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    {
        throw FieldError(path, "expected a complex number [re, im]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const CVector& v)
{
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i)
    {
        out.push_back(to_json(v[i]));
    }
    return out;
}

inline CVector read_cvector(const json& j, const std::string& path)
{
    read_array(j, path);
    CVector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        v[static_cast<Index>(i)] = read_complex(j[i], join(path, i));
    }
    return v;
}

inline std::vector<Complex> read_complex_list(const json& j, const std::string& path)
{
    const CVector v = read_cvector(j, path);
    return {v.data(), v.data() + v.size()};
}

inline json to_json(const CMatrix& m)
{
    json out = json::array();
    for (Index i = 0; i < m.rows(); ++i)
    {
        json row = json::array();
        for (Index k = 0; k < m.cols(); ++k)
        {
            row.push_back(to_json(m(i, k)));
        }
        out.push_back(std::move(row));
    }
    return out;
}

inline CMatrix read_cmatrix(const json& j, const std::string& path)
{
    read_array(j, path);
    const std::size_t rows = j.size();
    const std::size_t cols = rows == 0 ? 0 : read_array(j[0], join(path, 0)).size();
    CMatrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
    {
        const auto& row = read_array(j[i], join(path, i));
        if (row.size() != cols)
        {
            throw FieldError(join(path, i), "ragged matrix row");
        }
        for (std::size_t k = 0; k < cols; ++k)
        {
            m(static_cast<Index>(i), static_cast<Index>(k)) =
                read_complex(row[k], join(join(path, i), k));
        }
    }
    return m;
}

inline json to_json(const HermitianMatrix& m) { return to_json(m.matrix()); }

inline HermitianMatrix read_hermitian(const json& j, const std::string& path)
{
    const CMatrix m = read_cmatrix(j, path);
    return with_field(path, [&] { return HermitianMatrix(m); });
}

inline json to_json(const RVector& v)
{
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i)
    {
        out.push_back(v[i]);
    }
    return out;
}

inline std::vector<Index> read_dims(const json& j, const std::string& path)
{
    read_array(j, path);
    std::vector<Index> dims;
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        const int d = read_int(j[i], join(path, i));
        if (d < 0)
        {
            throw FieldError(join(path, i), "block dimension must be nonnegative");
        }
        dims.push_back(d);
    }
    return dims;
}

//------------------------------------------------------------------------------
// Domains, points, test functions
//------------------------------------------------------------------------------

inline json to_json(const Domain& d) { return d.tag(); }

inline Domain read_domain(const json& j, const std::string& path)
{
    const std::string tag = read_string(j, path);
    return with_field(path, [&] { return Domain::parse(tag); });
}

inline json to_json(const DomainPoint& p)
{
    return {{"domain", p.domain().tag()}, {"coords", to_json(p.coords())}};
}

/// A point is {domain, coords}; a bare coordinate list is accepted when the
/// domain is known from context.
inline DomainPoint read_point(const json& j, const std::string& path,
                              const std::optional<Domain>& context = std::nullopt)
{
    Domain d;
    CVector coords;
    if (j.is_object())
    {
        d = read_domain(require(j, "domain", path), join(path, "domain"));
        if (context && !(d == *context))
        {
            throw FieldError(join(path, "domain"), "expected " + context->tag());
        }
        coords = read_cvector(require(j, "coords", path), join(path, "coords"));
    }
    else
    {
        if (!context)
        {
            throw FieldError(path, "expected a point {domain, coords}");
        }
        d = *context;
        // A scalar or a single pair is a disc point.
        if (d.coordinate_count() == 1 && (j.is_number() || (j.is_array() && j.size() == 2 &&
                                                            j[0].is_number())))
        {
            coords = CVector::Constant(1, read_complex(j, path));
        }
        else
        {
            coords = read_cvector(j, path);
        }
    }
    return with_field(path, [&] { return DomainPoint(d, coords); });
}

inline std::vector<DomainPoint> read_points(const json& j, const std::string& path,
                                            const std::optional<Domain>& context = std::nullopt)
{
    read_array(j, path);
    std::vector<DomainPoint> out;
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        out.push_back(read_point(j[i], join(path, i), context));
    }
    return out;
}

inline const char* kind_name(TestKind k)
{
    switch (k)
    {
    case TestKind::identity:
        return "identity";
    case TestKind::coordinate:
        return "coordinate";
    case TestKind::sym_bidisc_param:
        return "sym_bidisc_param";
    case TestKind::ball_functional:
        return "ball_functional";
    }
    return "?";
}

inline json to_json(const TestFunction& t)
{
    json out = {{"family", kind_name(t.kind())}, {"domain", t.domain().tag()}};
    switch (t.kind())
    {
    case TestKind::identity:
        break;
    case TestKind::coordinate:
        out["index"] = t.coordinate_index();
        break;
    case TestKind::sym_bidisc_param:
        out["parameter"] = to_json(t.parameter());
        break;
    case TestKind::ball_functional:
        out["center"]    = to_json(t.center());
        out["direction"] = to_json(t.direction());
        break;
    }
    out["basepoint"] = to_json(t.basepoint().coords());
    return out;
}

inline TestFunction read_test_function(const json& j, const std::string& path)
{
    const std::string family = read_string(require(j, "family", path), join(path, "family"));
    return with_field(path, [&] {
        if (family == "identity")
        {
            return TestFunction::identity();
        }
        if (family == "coordinate")
        {
            const Domain d = read_domain(require(j, "domain", path), join(path, "domain"));
            if (d.kind != DomainKind::polydisc)
            {
                throw FieldError(join(path, "domain"), "coordinate functions live on a polydisc");
            }
            return TestFunction::coordinate(d.dim,
                                            read_int(require(j, "index", path), join(path, "index")));
        }
        if (family == "sym_bidisc_param")
        {
            return TestFunction::sym_bidisc(
                read_complex(require(j, "parameter", path), join(path, "parameter")));
        }
        if (family == "ball_functional")
        {
            const CVector c = read_cvector(require(j, "center", path), join(path, "center"));
            const CVector u = read_cvector(require(j, "direction", path), join(path, "direction"));
            std::optional<CVector> base;
            if (j.contains("basepoint"))
            {
                base = read_cvector(j["basepoint"], join(path, "basepoint"));
            }
            return TestFunction::ball_functional(c, u, base);
        }
        throw FieldError(join(path, "family"), "unknown test family '" + family + "'");
    });
}

inline std::vector<TestFunction> read_test_functions(const json& j, const std::string& path)
{
    read_array(j, path);
    std::vector<TestFunction> out;
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        out.push_back(read_test_function(j[i], join(path, i)));
    }
    return out;
}

inline json to_json(const DistanceResult& r)
{
    json out = {{"value", r.value}, {"extremal", to_json(r.extremal)}};
    if (r.argmax_parameter)
    {
        out["argmax_parameter"] = to_json(*r.argmax_parameter);
    }
    return out;
}

//------------------------------------------------------------------------------
// Kernels, Pick data, certificates
//------------------------------------------------------------------------------

inline json to_json(const KernelMatrix& k)
{
    json pts = json::array();
    for (const auto& p : k.points)
    {
        pts.push_back(to_json(p));
    }
    return {{"points", pts}, {"values", to_json(k.values)}};
}

inline KernelMatrix read_kernel_matrix(const json& j, const std::string& path)
{
    KernelMatrix k{read_points(require(j, "points", path), join(path, "points")),
                   read_hermitian(require(j, "values", path), join(path, "values"))};
    if (static_cast<Index>(k.points.size()) != k.values.dim())
    {
        throw FieldError(join(path, "values"), "size does not match the number of points");
    }
    return k;
}

inline json to_json(const AdmissibilityReport& r)
{
    json out = {{"admissible", r.admissible}, {"worst_min_eigenvalue", r.worst_min_eigenvalue}};
    if (r.worst_test)
    {
        out["worst_test"]  = to_json(*r.worst_test);
        out["worst_index"] = r.worst_index;
    }
    else
    {
        out["worst_test"] = nullptr;
    }
    return out;
}

inline json to_json(const PsdVerdict& v)
{
    return {{"is_psd", v.is_psd},
            {"min_eigenvalue", v.min_eigenvalue},
            {"tolerance_used", v.tolerance_used}};
}

inline json to_json(const PickData& d)
{
    json nodes = json::array();
    for (const auto& p : d.nodes)
    {
        nodes.push_back(to_json(p.coords()));
    }
    json targets = json::array();
    for (Complex w : d.targets)
    {
        targets.push_back(to_json(w));
    }
    return {{"domain", d.domain.tag()}, {"nodes", nodes}, {"targets", targets}};
}

/// {domain, nodes: [coords...], targets: [...]}
inline PickData read_pick_data(const json& j, const std::string& path)
{
    const Domain d = read_domain(require(j, "domain", path), join(path, "domain"));
    auto nodes     = read_points(require(j, "nodes", path), join(path, "nodes"), d);
    auto targets   = read_complex_list(require(j, "targets", path), join(path, "targets"));
    return with_field(path, [&] { return PickData(d, std::move(nodes), std::move(targets)); });
}

inline json to_json(const AglerCertificate& c)
{
    json g = json::array();
    for (const auto& m : c.gammas)
    {
        g.push_back(to_json(m));
    }
    return {{"gammas", g}};
}

inline AglerCertificate read_certificate(const json& j, const std::string& path)
{
    const auto& g = read_array(require(j, "gammas", path), join(path, "gammas"));
    AglerCertificate c;
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        c.gammas.push_back(read_hermitian(g[i], join(join(path, "gammas"), i)));
    }
    return c;
}

inline json to_json(const FeasibilityResult& r)
{
    return {{"status", to_string(r.status)},
            {"iterations", r.iterations},
            {"residual", r.residual}};
}

//------------------------------------------------------------------------------
// Colligations and Herglotz representations
//------------------------------------------------------------------------------

inline json to_json(const Colligation& c)
{
    return {{"a", to_json(c.a)},
            {"B", to_json(c.B)},
            {"C", to_json(c.C)},
            {"D", to_json(c.D)},
            {"block_dims", c.block_dims}};
}

inline Colligation read_colligation(const json& j, const std::string& path)
{
    Colligation c;
    c.a          = read_complex(require(j, "a", path), join(path, "a"));
    c.B          = read_cmatrix(require(j, "B", path), join(path, "B"));
    c.C          = read_cvector(require(j, "C", path), join(path, "C"));
    c.D          = read_cmatrix(require(j, "D", path), join(path, "D"));
    c.block_dims = read_dims(require(j, "block_dims", path), join(path, "block_dims"));
    const Index n = c.C.size();
    if (c.D.rows() != n || c.D.cols() != n)
    {
        throw FieldError(join(path, "D"), "must be square with the length of C");
    }
    if (n == 0)
    {
        c.B = CMatrix(1, 0);
        c.D = CMatrix(0, 0);
    }
    if (c.B.rows() != 1 || c.B.cols() != n)
    {
        throw FieldError(join(path, "B"), "must be a single row with the length of C");
    }
    if (c.state_dim() != std::accumulate(c.block_dims.begin(), c.block_dims.end(), Index{0}))
    {
        throw FieldError(join(path, "block_dims"), "must sum to the state dimension");
    }
    return c;
}

inline json to_json(const HerglotzData& h)
{
    return {{"b", h.b},
            {"U", to_json(h.U)},
            {"gamma", to_json(h.gamma)},
            {"block_dims", h.block_dims},
            {"basepoint", to_json(h.basepoint)}};
}

inline HerglotzData read_herglotz(const json& j, const std::string& path)
{
    HerglotzData h;
    h.b          = read_double(require(j, "b", path), join(path, "b"));
    h.U          = read_cmatrix(require(j, "U", path), join(path, "U"));
    h.gamma      = read_cvector(require(j, "gamma", path), join(path, "gamma"));
    h.block_dims = read_dims(require(j, "block_dims", path), join(path, "block_dims"));
    if (j.contains("basepoint"))
    {
        h.basepoint = read_complex(j["basepoint"], join(path, "basepoint"));
    }
    const Index n = h.gamma.size();
    if (n == 0)
    {
        h.U = CMatrix(0, 0);
    }
    if (h.U.rows() != n || h.U.cols() != n)
    {
        throw FieldError(join(path, "U"), "must be square with the length of gamma");
    }
    if (n != std::accumulate(h.block_dims.begin(), h.block_dims.end(), Index{0}))
    {
        throw FieldError(join(path, "block_dims"), "must sum to the length of gamma");
    }
    if (unitarity_defect(h.U) > 1e-9)
    {
        throw FieldError(join(path, "U"), "is not unitary");
    }
    return h;
}

inline json to_json(const HerglotzFitTrace& t)
{
    return {{"g_vectors", to_json(t.g_vectors)},
            {"k_vectors", to_json(t.k_vectors)},
            {"V", to_json(t.V)},
            {"a_entry", to_json(t.a_entry)},
            {"beta", to_json(t.beta)},
            {"D_block", to_json(t.D_block)},
            {"values_of_k_defect", t.values_of_k_defect},
            {"scale", t.scale}};
}

//------------------------------------------------------------------------------
// Drury-Arveson extremal problem
//------------------------------------------------------------------------------

inline json to_json(const ExtremalMultiplier& f)
{
    return {{"center", to_json(f.center)}, {"direction", to_json(f.direction)}};
}

inline json to_json(const PhaseConstraint& pc)
{
    return {{"cstar", pc.cstar}, {"eta", to_json(pc.eta)}};
}

inline json to_json(const ProofStepReport& r)
{
    return {{"normalized_kernel", to_json(r.normalized_kernel)},
            {"theta", r.theta},
            {"sigma", r.sigma},
            {"determinant_lhs", r.determinant_lhs},
            {"determinant_rhs", r.determinant_rhs},
            {"am_gm_a", r.am_gm_a},
            {"am_gm_b", r.am_gm_b},
            {"phase_alignment", r.phase_alignment},
            {"tight", r.tight}};
}

} // namespace schur_agler::io
