///
/// \file cli.hpp
///
/// Batch front end: a job is {command, params, tolerances} in JSON, the
/// result is a JSON document plus an exit code (0 ok, 1 rejected input,
/// 2 numerical failure or exhausted budget). tools/schur_agler_cli.cpp is a
/// thin argument-parsing shell around run().
///

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "schur_agler/acceptance.hpp"
#include "schur_agler/serialization.hpp"

namespace schur_agler::cli {

using io::json;

enum ExitCode : int
{
    exit_ok        = 0,
    exit_rejected  = 1,
    exit_numerical = 2,
};

//------------------------------------------------------------------------------
// Configuration
//------------------------------------------------------------------------------

/// Every tunable in one place. The defaults table below is also what
/// `describe_defaults` prints and what the README documents.
struct Config
{
    double psd_tol             = default_psd_tol;
    double rank_tol            = default_rank_tol;
    double gram_tol            = default_gram_tol;
    double feasibility_tol     = 1e-8;
    int budget                 = 20000;
    double certificate_tol     = 1e-6;
    int boundary_angles        = 4096;
    int interior_grid          = 64;
    double golden_tol          = 1e-10;
    int family_truncation      = 4096;
    int scan_grid              = 200;
    double scan_margin         = 1e-6;
    double phase_tol           = 5e-2;
    std::uint64_t seed         = 20240611;
    unsigned threads           = 1;

    SymBidiscSearch search() const
    {
        SymBidiscSearch s;
        s.boundary_angles = boundary_angles;
        s.interior_grid   = interior_grid;
        s.golden_tol      = golden_tol;
        return s;
    }
};

struct ConfigKey
{
    const char* name;
    const char* meaning;
};

inline const std::vector<ConfigKey>& config_keys()
{
    static const std::vector<ConfigKey> keys{
        {"psd_tol", "relative PSD tolerance, tol * max(1, max|M|)"},
        {"rank_tol", "relative eigenvalue cutoff in Gram factorizations"},
        {"gram_tol", "allowed Gram mismatch in unitary completion"},
        {"feasibility_tol", "combined residual accepted as a certificate"},
        {"budget", "Dykstra iteration budget"},
        {"certificate_tol", "certificate residual accepted by the realization step"},
        {"boundary_angles", "symmetrized-bidisc boundary grid size"},
        {"interior_grid", "symmetrized-bidisc interior grid side"},
        {"golden_tol", "golden-section refinement tolerance"},
        {"family_truncation", "boundary parameters kept when a continuous family is truncated"},
        {"scan_grid", "side of the w3 grid in da-scan"},
        {"scan_margin", "grid points with |w| >= 1 - margin are skipped"},
        {"phase_tol", "tolerance for phase_check in da-scan"},
        {"seed", "seed for randomized suites"},
        {"threads", "worker threads for grid scans"},
    };
    return keys;
}

inline json to_json(const Config& c)
{
    return {{"psd_tol", c.psd_tol},
            {"rank_tol", c.rank_tol},
            {"gram_tol", c.gram_tol},
            {"feasibility_tol", c.feasibility_tol},
            {"budget", c.budget},
            {"certificate_tol", c.certificate_tol},
            {"boundary_angles", c.boundary_angles},
            {"interior_grid", c.interior_grid},
            {"golden_tol", c.golden_tol},
            {"family_truncation", c.family_truncation},
            {"scan_grid", c.scan_grid},
            {"scan_margin", c.scan_margin},
            {"phase_tol", c.phase_tol},
            {"seed", c.seed},
            {"threads", c.threads}};
}

/// Applies overrides from a JSON object; unknown keys are rejected.
inline Config merge(Config c, const json& overrides, const std::string& path)
{
    if (overrides.is_null())
    {
        return c;
    }
    if (!overrides.is_object())
    {
        throw FieldError(path, "expected an object of tolerance overrides");
    }
    for (auto it = overrides.begin(); it != overrides.end(); ++it)
    {
        const std::string& k = it.key();
        const std::string at = io::join(path, k);
        const json& v        = it.value();
        auto positive        = [&](double x) {
            if (!(x > 0.0))
            {
                throw FieldError(at, "must be positive");
            }
            return x;
        };
        auto count = [&](int lo) {
            const int n = io::read_int(v, at);
            if (n < lo)
            {
                throw FieldError(at, "must be at least " + std::to_string(lo));
            }
            return n;
        };
        if (k == "psd_tol")
            c.psd_tol = positive(io::read_double(v, at));
        else if (k == "rank_tol")
            c.rank_tol = positive(io::read_double(v, at));
        else if (k == "gram_tol")
            c.gram_tol = positive(io::read_double(v, at));
        else if (k == "feasibility_tol")
            c.feasibility_tol = positive(io::read_double(v, at));
        else if (k == "budget")
            c.budget = count(1);
        else if (k == "certificate_tol")
            c.certificate_tol = positive(io::read_double(v, at));
        else if (k == "boundary_angles")
            c.boundary_angles = count(8);
        else if (k == "interior_grid")
            c.interior_grid = count(0);
        else if (k == "golden_tol")
            c.golden_tol = positive(io::read_double(v, at));
        else if (k == "family_truncation")
            c.family_truncation = count(1);
        else if (k == "scan_grid")
            c.scan_grid = count(2);
        else if (k == "scan_margin")
            c.scan_margin = positive(io::read_double(v, at));
        else if (k == "phase_tol")
            c.phase_tol = positive(io::read_double(v, at));
        else if (k == "seed")
        {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            {
                throw FieldError(at, "expected a nonnegative integer");
            }
            c.seed = v.get<std::uint64_t>();
        }
        else if (k == "threads")
            c.threads = static_cast<unsigned>(count(1));
        else
            throw FieldError(at, "unknown setting");
    }
    return c;
}

//------------------------------------------------------------------------------
// Commands
//------------------------------------------------------------------------------

struct Outcome
{
    json output;
    int exit_code = exit_ok;
};

namespace detail {

inline const json& param(const json& params, const std::string& key)
{
    return io::require(params, key, "params");
}

inline std::string at(const std::string& key) { return io::join("params", key); }

inline bool has(const json& params, const std::string& key)
{
    return params.is_object() && params.contains(key) && !params[key].is_null();
}

/// Ball points given as bare coordinate arrays (or point objects).
inline CVector ball_coords(const json& params, const std::string& key, std::optional<Domain>& dom)
{
    const json& j = param(params, key);
    if (!dom && !j.is_object())
    {
        io::read_array(j, at(key));
        dom = Domain::ball(static_cast<int>(j.size()));
    }
    const auto p = io::read_point(j, at(key), dom);
    if (p.domain().kind != DomainKind::ball)
    {
        throw FieldError(at(key), "expected a ball point");
    }
    dom = p.domain();
    return p.coords();
}

struct BallTriple
{
    CVector z1, z2, z3;
};

inline BallTriple ball_triple(const json& params, bool need_z3 = true)
{
    std::optional<Domain> dom;
    if (has(params, "domain"))
    {
        dom = io::read_domain(params["domain"], at("domain"));
        if (dom->kind != DomainKind::ball)
        {
            throw FieldError(at("domain"), "expected a ball domain");
        }
    }
    BallTriple t;
    t.z1 = ball_coords(params, "z1", dom);
    t.z2 = ball_coords(params, "z2", dom);
    if (need_z3)
    {
        t.z3 = ball_coords(params, "z3", dom);
    }
    if (t.z1 == t.z2)
    {
        throw FieldError(at("z2"), "z1 and z2 coincide");
    }
    return t;
}

/// params.family: omitted or "full" for the domain's own family, or an explicit
/// list of test-function descriptors. Returns the finite list used plus a
/// label naming any truncation.
inline std::pair<std::vector<TestFunction>, std::string>
finite_family(const json& params, const Domain& d, const Config& cfg)
{
    if (has(params, "family") && params["family"].is_array())
    {
        auto members = io::read_test_functions(params["family"], at("family"));
        for (std::size_t i = 0; i < members.size(); ++i)
        {
            if (!(members[i].domain() == d))
            {
                throw FieldError(io::join(at("family"), i), "test function lives on " +
                                                                  members[i].domain().tag());
            }
        }
        return {std::move(members), "explicit"};
    }
    if (has(params, "family") && !(params["family"].is_string() && params["family"] == "full"))
    {
        throw FieldError(at("family"), "expected \"full\" or a list of test functions");
    }
    const auto full = TestFamily::full(d);
    if (full.kind() == TestFamily::Kind::finite)
    {
        return {full.members(), "full"};
    }
    if (full.kind() == TestFamily::Kind::sym_bidisc_continuum)
    {
        return {full.truncation(cfg.family_truncation),
                "boundary truncation " + std::to_string(cfg.family_truncation)};
    }
    throw FieldError(at("family"), "the ball functional family is continuous; pass an explicit list");
}

inline Outcome distance(const json& params, const Config& cfg)
{
    const Domain d = io::read_domain(param(params, "domain"), at("domain"));
    const auto z1  = io::read_point(param(params, "z1"), at("z1"), d);
    const auto z2  = io::read_point(param(params, "z2"), at("z2"), d);
    const auto r   = caratheodory_distance(d, z1, z2, cfg.search());
    json out       = io::to_json(r);
    out["domain"]  = d.tag();
    return {out, exit_ok};
}

inline Outcome extremal(const json& params, const Config&)
{
    const bool with_z3 = has(params, "z3");
    const auto t       = ball_triple(params, with_z3);
    const auto f       = ball_extremal(t.z1, t.z2);
    json out           = {{"multiplier", io::to_json(f)},
                          {"value_at_z1", io::to_json(f(t.z1))},
                          {"value_at_z2", io::to_json(f(t.z2))},
                          {"cstar", ball_distance(t.z1, t.z2)}};
    // Two-point Drury-Arveson Pick matrix of (z1, z2) -> (f(z1), f(z2)).
    const Domain d = Domain::ball(static_cast<int>(t.z1.size()));
    const PickData two(d, {DomainPoint(d, t.z1), DomainPoint(d, t.z2)}, {f(t.z1), f(t.z2)});
    out["two_point_pick"] = io::to_json(is_psd(pick_matrix(two, KernelKind::drury_arveson)));
    if (with_z3)
    {
        const auto pc         = predicted_phase(t.z1, t.z2, t.z3);
        const Complex w3      = f(t.z3);
        out["value_at_z3"]    = io::to_json(w3);
        out["phase"]          = io::to_json(pc);
        out["phase_error_z3"] = phase_error(pc, w3);
    }
    return {out, exit_ok};
}

inline Outcome admissible(const json& params, const Config& cfg)
{
    KernelMatrix k;
    if (has(params, "kernel"))
    {
        k = io::read_kernel_matrix(params["kernel"], at("kernel"));
    }
    else
    {
        const Domain d  = io::read_domain(param(params, "domain"), at("domain"));
        auto points     = io::read_points(param(params, "points"), at("points"), d);
        const auto kind = has(params, "kernel_kind")
                              ? io::with_field(at("kernel_kind"), [&] {
                                    return kernel_kind_from_string(
                                        io::read_string(params["kernel_kind"], at("kernel_kind")));
                                })
                              : io::with_field(at("domain"), [&] { return natural_kernel(d); });
        k = io::with_field("params", [&] { return kernel_matrix(kind, std::move(points)); });
    }
    if (k.points.empty())
    {
        throw FieldError(at("points"), "at least one point is required");
    }
    const Domain d            = k.points.front().domain();
    const auto [family, used] = finite_family(params, d, cfg);
    const auto report         = admissible_check(k, family, cfg.psd_tol);
    json out                  = io::to_json(report);
    out["family"]             = used;
    out["family_size"]        = family.size();
    return {out, exit_ok};
}

inline PickData pick_data(const json& params)
{
    if (has(params, "data"))
    {
        return io::read_pick_data(params["data"], at("data"));
    }
    return io::read_pick_data(params, "params");
}

inline Outcome pick(const json& params, const Config& cfg)
{
    const auto data = pick_data(params);
    const auto kind = has(params, "kernel_kind")
                          ? io::with_field(at("kernel_kind"), [&] {
                                return kernel_kind_from_string(
                                    io::read_string(params["kernel_kind"], at("kernel_kind")));
                            })
                          : io::with_field(at("domain"), [&] { return natural_kernel(data.domain); });
    const auto m = io::with_field("params", [&] { return pick_matrix(data, kind); });
    return {{{"kernel_kind", to_string(kind)},
             {"matrix", io::to_json(m)},
             {"verdict", io::to_json(is_psd(m, cfg.psd_tol))}},
            exit_ok};
}

inline std::vector<TestFunction> agler_family_for(const json& params, const PickData& data,
                                                  const Config& cfg)
{
    if (has(params, "family"))
    {
        return finite_family(params, data.domain, cfg).first;
    }
    return io::with_field(at("domain"), [&] { return agler_family(data.domain); });
}

inline Outcome agler(const json& params, const Config& cfg)
{
    const auto data   = pick_data(params);
    const auto family = agler_family_for(params, data, cfg);
    AglerOptions opt;
    opt.budget       = cfg.budget;
    opt.tol          = cfg.feasibility_tol;
    const auto r     = io::with_field("params", [&] { return agler_decompose(data, family, opt); });
    json out         = io::to_json(r.feasibility);
    out["certificate"] = io::to_json(r.certificate);
    out["certificate_residual"] = certificate_residual(data, r.certificate, family);
    return {out, r.ok() ? exit_ok : exit_numerical};
}

inline Outcome realize(const json& params, const Config& cfg)
{
    const auto data   = pick_data(params);
    const auto family = agler_family_for(params, data, cfg);
    AglerCertificate cert;
    json out = json::object();
    if (has(params, "certificate"))
    {
        cert = io::read_certificate(params["certificate"], at("certificate"));
    }
    else
    {
        AglerOptions opt;
        opt.budget   = cfg.budget;
        opt.tol      = cfg.feasibility_tol;
        const auto r = io::with_field("params", [&] { return agler_decompose(data, family, opt); });
        out["feasibility"] = io::to_json(r.feasibility);
        if (!r.ok())
        {
            out["error"] = {{"kind", "budget_exhausted"},
                            {"message", "no Agler certificate found within the iteration budget"}};
            return {out, exit_numerical};
        }
        cert = r.certificate;
    }
    const auto col = io::with_field(at("certificate"), [&] {
        return lurking_isometry(data, cert, family, cfg.certificate_tol, cfg.gram_tol);
    });
    out["colligation"]         = io::to_json(col);
    out["interpolation_error"] = realization_check(col, data, family);
    out["unitarity_defect"]    = col.unitarity_defect();
    return {out, exit_ok};
}

inline Outcome da_scan(const json& params, const Config& cfg)
{
    const auto t = ball_triple(params);
    ScanOptions so;
    so.grid_n          = has(params, "grid_n") ? io::read_int(params["grid_n"], at("grid_n")) : cfg.scan_grid;
    so.psd_tol         = cfg.psd_tol;
    so.boundary_margin = cfg.scan_margin;
    so.threads         = cfg.threads;
    const auto pc      = predicted_phase(t.z1, t.z2, t.z3);
    const auto scan    = io::with_field(at("grid_n"), [&] { return feasible_w3_scan(t.z1, t.z2, t.z3, so); });
    json feasible      = json::array();
    bool all_ok        = true;
    for (Complex w : scan.feasible)
    {
        const bool ok = phase_check(pc, w, cfg.phase_tol);
        all_ok        = all_ok && ok;
        feasible.push_back({{"w", io::to_json(w)}, {"phase_ok", ok}});
    }
    const Complex w3 = ball_extremal(t.z1, t.z2)(t.z3);
    return {{{"phase", io::to_json(pc)},
             {"grid_n", scan.grid_n},
             {"feasible", feasible},
             {"all_feasible_phase_ok", all_ok},
             {"best", {{"w", io::to_json(scan.best)},
                       {"min_eigenvalue", scan.best_min_eigenvalue},
                       {"phase_error", phase_error(pc, scan.best)}}},
             {"extremal_value", {{"w", io::to_json(w3)}, {"phase_error", phase_error(pc, w3)}}},
             {"phase_tol", cfg.phase_tol}},
            exit_ok};
}

inline Outcome da_verify(const json& params, const Config& cfg)
{
    const auto t = ball_triple(params);
    const Complex w3 = has(params, "w3") ? io::read_complex(params["w3"], at("w3"))
                                         : ball_extremal(t.z1, t.z2)(t.z3);
    const auto rep = io::with_field(at("w3"), [&] {
        return proof_inequality_check(t.z1, t.z2, t.z3, w3, cfg.psd_tol);
    });
    const auto pc = predicted_phase(t.z1, t.z2, t.z3);
    json out      = io::to_json(rep);
    out["w3"]          = io::to_json(w3);
    out["phase"]       = io::to_json(pc);
    out["phase_error"] = phase_error(pc, w3);
    out["holds"]       = rep.determinant_lhs >= rep.determinant_rhs - 1e-10;
    return {out, exit_ok};
}

inline Outcome herglotz_eval_cmd(const json& params, const Config&)
{
    const auto rep = io::read_herglotz(param(params, "representation"), at("representation"));
    json values    = json::array();
    if (has(params, "points"))
    {
        const auto pts = io::read_complex_list(params["points"], at("points"));
        for (std::size_t i = 0; i < pts.size(); ++i)
        {
            values.push_back(io::to_json(io::with_field(io::join(at("points"), i), [&] {
                return herglotz_eval_disc(rep, pts[i]);
            })));
        }
    }
    else
    {
        const auto& e = io::read_array(param(params, "e_star"), at("e_star"));
        for (std::size_t i = 0; i < e.size(); ++i)
        {
            const std::string p = io::join(at("e_star"), i);
            const CVector v     = io::read_cvector(e[i], p);
            if (v.size() > 0 && !(v.cwiseAbs().maxCoeff() < 1.0))
            {
                throw FieldError(p, "entries must lie in the open unit disc");
            }
            values.push_back(io::to_json(io::with_field(p, [&] {
                return herglotz_eval(rep, BlockDiagonal{v, rep.block_dims});
            })));
        }
    }
    return {{{"values", values}}, exit_ok};
}

inline Outcome herglotz_fit_cmd(const json& params, const Config& cfg)
{
    const auto pts  = io::read_complex_list(param(params, "points"), at("points"));
    const auto vals = io::read_complex_list(param(params, "values"), at("values"));
    const int w0    = has(params, "w0_index") ? io::read_int(params["w0_index"], at("w0_index")) : 0;
    if (w0 < 0)
    {
        throw FieldError(at("w0_index"), "must be nonnegative");
    }
    HerglotzFitOptions opt;
    opt.psd_tol  = cfg.psd_tol;
    opt.rank_tol = cfg.rank_tol;
    opt.gram_tol = cfg.gram_tol;
    const auto fit = io::with_field("params", [&] {
        return herglotz_fit(pts, vals, static_cast<std::size_t>(w0), opt);
    });
    double err = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        err = std::max(err, std::abs(herglotz_eval_disc(fit.data, pts[i]) - vals[i]));
    }
    return {{{"representation", io::to_json(fit.data)},
             {"trace", io::to_json(fit.trace)},
             {"sample_error", err},
             {"unitarity_defect", unitarity_defect(fit.data.U)}},
            exit_ok};
}

inline Outcome suite(const json&, const Config& cfg)
{
    acceptance::SuiteOptions opt;
    opt.seed    = cfg.seed;
    opt.threads = cfg.threads;
    json report = json::array();
    bool all    = true;
    for (const auto& r : acceptance::run_all(opt))
    {
        all = all && r.passed;
        report.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    }
    return {{{"criteria", report}, {"all_passed", all}, {"seed", cfg.seed}},
            all ? exit_ok : exit_numerical};
}

} // namespace detail

using Handler = Outcome (*)(const json&, const Config&);

inline const std::map<std::string, Handler>& commands()
{
    static const std::map<std::string, Handler> table{
        {"distance", detail::distance},         {"extremal", detail::extremal},
        {"admissible", detail::admissible},     {"pick", detail::pick},
        {"agler", detail::agler},               {"realize", detail::realize},
        {"da-scan", detail::da_scan},           {"da-verify", detail::da_verify},
        {"herglotz-eval", detail::herglotz_eval_cmd},
        {"herglotz-fit", detail::herglotz_fit_cmd},
        {"suite", detail::suite},
    };
    return table;
}

inline json error_object(const std::string& kind, const std::string& field, const std::string& message)
{
    json e = {{"kind", kind}, {"message", message}};
    if (!field.empty())
    {
        e["field"] = field;
    }
    return {{"error", e}};
}

/// Runs one job. `command_override`, when non-empty, replaces job.command;
/// `base` already holds the config-file settings.
inline Outcome run(const json& job, const Config& base, const std::string& command_override = "")
{
    try
    {
        if (!job.is_object())
        {
            throw FieldError("<root>", "a job must be a JSON object");
        }
        std::string command = command_override;
        if (command.empty())
        {
            command = io::read_string(io::require(job, "command", ""), "command");
        }
        const auto it = commands().find(command);
        if (it == commands().end())
        {
            throw FieldError("command", "unknown command '" + command + "'");
        }
        for (auto k = job.begin(); k != job.end(); ++k)
        {
            if (k.key() != "command" && k.key() != "params" && k.key() != "tolerances")
            {
                throw FieldError(k.key(), "unknown job field");
            }
        }
        const Config cfg = merge(base, job.contains("tolerances") ? job["tolerances"] : json(),
                                 "tolerances");
        const json params = job.contains("params") ? job["params"] : json::object();
        if (!params.is_object())
        {
            throw FieldError("params", "expected an object");
        }
        Outcome out = it->second(params, cfg);
        out.output["command"] = command;
        return out;
    }
    catch (const FieldError& e)
    {
        return {error_object("rejected_input", e.field(), e.what()), exit_rejected};
    }
    catch (const InputError& e)
    {
        return {error_object("rejected_input", "", e.what()), exit_rejected};
    }
    catch (const json::exception& e)
    {
        return {error_object("rejected_input", "", e.what()), exit_rejected};
    }
    catch (const NumericalError& e)
    {
        return {error_object("numerical_failure", "", e.what()), exit_numerical};
    }
}

/// Parses job text; malformed JSON is a rejected input.
inline Outcome run_text(const std::string& text, const Config& base, const std::string& command_override = "")
{
    json job;
    try
    {
        job = text.find_first_not_of(" \t\r\n") == std::string::npos && !command_override.empty()
                  ? json::object()
                  : json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        return {error_object("rejected_input", "<root>", std::string("malformed JSON: ") + e.what()),
                exit_rejected};
    }
    return run(job, base, command_override);
}

} // namespace schur_agler::cli
