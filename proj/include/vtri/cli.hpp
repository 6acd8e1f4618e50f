#pragma once

#include "scene.hpp"

#include <functional>
#include <map>
#include <sstream>
#include <string>

namespace vtri {

struct CommandFlags {
    unsigned seed = 0;
    bool doc = false;
};

struct CommandResult {
    std::string report;
    int exit_code = 0;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int check_failed = 1;
inline constexpr int parse_error = 2;
inline constexpr int resource_limit = 3;
} // namespace exit_code

namespace detail {

class Report {
public:
    void kv(const std::string& key, const std::string& value) { lines_ << key << ": " << value << '\n'; }
    void kv(const std::string& key, std::size_t value) { kv(key, std::to_string(value)); }
    void line(const std::string& s) { lines_ << s << '\n'; }
    std::string str() const { return lines_.str(); }

private:
    std::ostringstream lines_;
};

inline std::string points_text(const Point& p)
{
    std::string out;
    for (const auto& x : p)
        out += (out.empty() ? "" : " ") + scalar_token(x);
    return out;
}

inline const std::string& first_complex(const Scene& s, std::size_t i = 0)
{
    if (s.complexes.size() <= i)
        fail(ErrorKind::UnresolvedReference, "scene needs at least " + std::to_string(i + 1) + " complex(es)");
    return s.complexes[i].name;
}

inline const SceneMap& first_map(const Scene& s)
{
    if (s.maps.empty())
        fail(ErrorKind::UnresolvedReference, "scene has no map");
    return s.maps.front();
}

inline const std::vector<FieldElement>& nth_values(const Scene& s, std::size_t i)
{
    if (s.values.size() <= i)
        fail(ErrorKind::UnresolvedReference, "scene needs at least " + std::to_string(i + 1) + " values line(s)");
    return s.values[i].values;
}

inline Complex complex_of(const Scene& s, const std::string& name)
{
    return validate_complex(s.complex_simplexes(name));
}

/// A complex output: a scene in doc mode, a summary otherwise.
inline void emit_complex(Report& r, SceneBuilder& b, const std::string& name, const Complex& k, bool doc)
{
    auto all = k.all_simplexes();
    r.kv(name + ".vertices", k.vertices().size());
    r.kv(name + ".simplexes", all.size());
    r.kv(name + ".dimension", std::to_string(k.dim()));
    if (doc)
        b.complex(name, all);
}

inline void emit_map(Report& r, SceneBuilder& b, const std::string& name, const std::string& complex, const PLMap& f,
                     bool doc)
{
    r.kv(name + ".vertices", f.images.size());
    for (std::size_t i = 0; i < f.images.size(); ++i)
        r.line("  " + points_text(f.domain.vertex(static_cast<int>(i))) + " -> " + points_text(f.images[i]));
    if (doc)
        b.map(name, complex, f);
}

inline CommandResult finish(Report& r, const SceneBuilder& b, bool doc, int code)
{
    if (!doc)
        return {r.str(), code};
    std::string out = print_scene(b.scene());
    std::istringstream lines(r.str());
    std::string line;
    while (std::getline(lines, line))
        out += "# " + line + '\n';
    return {out, code};
}

using Handler = std::function<CommandResult(const Scene&, const CommandFlags&)>;

inline CommandResult cmd_validate(const Scene& s, const CommandFlags& fl)
{
    Report r;
    r.kv("dimension", s.dim);
    r.kv("points", s.points.size());
    r.kv("simplexes", s.simplexes.size());
    for (const auto& x : s.simplexes)
        s.simplex(x.name);
    for (const auto& c : s.complexes) {
        try {
            Complex k = complex_of(s, c.name);
            r.kv("complex " + c.name, "ok, " + std::to_string(k.all_simplexes().size()) + " simplexes");
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::ResourceLimit)
                throw;
            r.kv("complex " + c.name, std::string("invalid: ") + e.what());
            return {r.str(), exit_code::check_failed};
        }
    }
    for (const auto& x : s.subsets)
        s.subset(x.name);
    for (const auto& m : s.maps)
        s.map(m.name);
    for (const auto& m : s.multis)
        s.multi(m.name);
    for (const auto& p : s.polyhedra)
        s.polyhedron(p.name);
    r.kv("references", "resolved");
    (void)fl;
    return {r.str(), exit_code::ok};
}

inline CommandResult cmd_st(const Scene& s, const CommandFlags& fl)
{
    Report r;
    SceneBuilder b;
    VComplex k = make_vcomplex(complex_of(s, first_complex(s)));
    emit_complex(r, b, "st", k.st, fl.doc);
    return finish(r, b, fl.doc, exit_code::ok);
}

inline CommandResult cmd_prism(const Scene& s, const CommandFlags& fl)
{
    if (s.simplexes.empty())
        fail(ErrorKind::UnresolvedReference, "scene has no simplex");
    Report r;
    SceneBuilder b;
    VSimplexOrder o = v_simplex_order(s.simplex(s.simplexes.front().name));
    VComplex l = prism_complex(o, nth_values(s, 0), nth_values(s, 1));
    emit_complex(r, b, "prism", l.base, fl.doc);
    return finish(r, b, fl.doc, exit_code::ok);
}

inline CommandResult cmd_subdivide(const Scene& s, const CommandFlags& fl)
{
    Report r;
    SceneBuilder b;
    VComplex k = flag_subdivision(make_vcomplex(complex_of(s, first_complex(s))));
    emit_complex(r, b, "subdivision", k.base, fl.doc);
    return finish(r, b, fl.doc, exit_code::ok);
}

inline CommandResult cmd_gooddir(const Scene& s, const CommandFlags&)
{
    Report r;
    Complex k = complex_of(s, first_complex(s));
    Point u = v_good_direction(k.maximal_simplexes(), s.dim);
    r.kv("direction", points_text(u));
    r.kv("shear", points_text(shear_to_vertical(u).shift));
    return {r.str(), exit_code::ok};
}

inline CommandResult cmd_lift(const Scene& s, const CommandFlags& fl)
{
    if (s.multis.empty())
        fail(ErrorKind::UnresolvedReference, "scene has no multifunction");
    Report r;
    SceneBuilder b;
    const auto& m = s.multis.front();
    Complex base = complex_of(s, m.base);
    Lift l = lift_triangulation(identity_vtriangulation(base.maximal_simplexes(), base), s.multi(m.name), fl.seed);
    emit_complex(r, b, "lift", l.result.k.base, fl.doc);
    emit_complex(r, b, "M", l.m, fl.doc);
    r.kv("probes", l.probes);
    r.kv("st(L) = M", "checked");
    return finish(r, b, fl.doc, exit_code::ok);
}

inline void report_axioms(Report& r, const VerificationReport& v)
{
    for (const auto& a : v.axioms)
        r.kv("axiom " + a.name, a.passed ? "passed" : "FAILED: " + a.witness);
    r.line(v.ok() ? "all checks passed" : "verification failed");
}

inline CommandResult cmd_triangulate(const Scene& s, const CommandFlags& fl)
{
    Report r;
    SceneBuilder b(s);
    auto y = s.complex_simplexes(first_complex(s));
    auto subsets = s.all_subsets();
    TriangulationStats stats;
    VTriangulation t = v_triangulate(y, subsets, &stats, fl.seed);
    TriangulationDocument doc = document_of(t);
    r.kv("levels", stats.levels);
    r.kv("star rounds", stats.star_rounds);
    r.kv("K.vertices", t.k.base.vertices().size());
    r.kv("K.simplexes", doc.k.size());
    r.kv("domain.simplexes", doc.domain.size());
    b.complex("K", doc.k);
    std::string dom = b.complex("domain", doc.domain);
    b.map("phi", dom, t.phi);
    VerificationReport v = verify_v_triangulation(y, subsets, doc, fl.seed);
    report_axioms(r, v);
    return finish(r, b, fl.doc, v.ok() ? exit_code::ok : exit_code::check_failed);
}

inline CommandResult cmd_verify(const Scene& s, const CommandFlags& fl)
{
    Report r;
    TriangulationDocument doc;
    doc.k = s.complex_simplexes("K");
    doc.domain = s.complex_simplexes("domain");
    if (!s.has_map("phi"))
        fail(ErrorKind::UnresolvedReference, "no map named phi");
    for (const auto& m : s.maps)
        if (m.name == "phi")
            for (const auto& [v, img] : m.images)
                doc.vertex_map.emplace_back(s.point(v), img);
    auto y = s.complex_simplexes(first_complex(s));
    VerificationReport v = verify_v_triangulation(y, s.all_subsets(), doc, fl.seed);
    report_axioms(r, v);
    return {r.str(), v.ok() ? exit_code::ok : exit_code::check_failed};
}

inline CommandResult cmd_hausdorff(const Scene& s, const CommandFlags&)
{
    Report r;
    FieldElement d =
        hausdorff_distance(s.complex_simplexes(first_complex(s, 0)), s.complex_simplexes(first_complex(s, 1)));
    r.kv("distance", scalar_token(d));
    r.kv("valuation", d.is_zero() ? std::string("inf") : std::to_string(d.valuation()));
    r.kv("standard part", scalar_token(FieldElement(d.standard_part())));
    return {r.str(), exit_code::ok};
}

inline CommandResult cmd_hauslim(const Scene& s, const CommandFlags& fl)
{
    Report r;
    SceneBuilder b;
    HausdorffLimit h;
    if (!s.families.empty()) {
        h = hausdorff_limit(s.family(s.families.front().name));
    } else {
        if (s.polyhedra.empty())
            fail(ErrorKind::UnresolvedReference, "scene has no family and no polyhedron");
        std::vector<Polyhedron> ps;
        for (const auto& p : s.polyhedra)
            ps.push_back(s.polyhedron(p.name));
        h = hausdorff_limit(ps);
    }
    r.kv("limit.dimension", std::to_string(h.limit_dim));
    r.kv("section.dimension", std::to_string(h.section_dim));
    for (const auto& x : h.limit)
        r.kv("limit piece", to_string(x));
    r.kv("distance", scalar_token(h.distance));
    r.kv("valuation", h.distance.is_zero() ? std::string("inf") : std::to_string(h.distance.valuation()));
    r.kv("certificate", "distance is infinitesimal");
    if (fl.doc)
        b.complex("H", h.limit);
    return finish(r, b, fl.doc, exit_code::ok);
}

inline CommandResult cmd_type(const Scene& s, const CommandFlags&)
{
    Report r;
    ComplexType t = complex_type(make_vcomplex(complex_of(s, first_complex(s))));
    r.kv("vertices", std::to_string(t.n));
    r.kv("simplexes", t.c.size());
    std::string classes;
    for (int e : t.e)
        classes += (classes.empty() ? "" : " ") + std::to_string(e);
    r.kv("st classes", classes);
    if (s.complexes.size() < 2)
        return {r.str(), exit_code::ok};
    ComplexType t2 = complex_type(make_vcomplex(complex_of(s, first_complex(s, 1))));
    auto pi = type_equal(t, t2);
    r.kv("type equal", pi ? "yes" : "no");
    if (pi) {
        std::string p;
        for (int i : *pi)
            p += (p.empty() ? "" : " ") + std::to_string(i);
        r.kv("bijection", p);
    }
    return {r.str(), pi ? exit_code::ok : exit_code::check_failed};
}

inline CommandResult cmd_homeo(const Scene& s, const CommandFlags& fl)
{
    Report r;
    SceneBuilder b;
    VComplex k = make_vcomplex(complex_of(s, first_complex(s, 0)));
    VComplex k2 = make_vcomplex(complex_of(s, first_complex(s, 1)));
    auto pi = type_equal(complex_type(k), complex_type(k2));
    if (!pi) {
        r.kv("type equal", "no");
        r.kv("witness", std::to_string(k.base.vertices().size()) + " vs " + std::to_string(k2.base.vertices().size()) +
                            " vertices, " + std::to_string(k.base.simplexes().size()) + " vs " +
                            std::to_string(k2.base.simplexes().size()) + " simplexes");
        return {r.str(), exit_code::check_failed};
    }
    PLMap h = canonical_v_homeomorphism(k, k2, *pi);
    std::string dom = fl.doc ? b.complex("source", k.base.all_simplexes()) : "";
    emit_map(r, b, "homeomorphism", dom, h, fl.doc);
    return finish(r, b, fl.doc, exit_code::ok);
}

inline CommandResult cmd_extend(const Scene& s, const CommandFlags& fl)
{
    Report r;
    SceneBuilder b;
    const SceneMap& m = first_map(s);
    PLMap f = s.map(m.name);
    std::string target;
    for (const auto& c : s.complexes)
        if (c.name != m.complex) {
            target = c.name;
            break;
        }
    if (target.empty())
        fail(ErrorKind::UnresolvedReference, "scene needs a complex besides the domain of " + m.name);
    PLMap g;
    if (!s.values.empty()) {
        auto ss = s.complex_simplexes(target);
        if (ss.size() != 1)
            fail(ErrorKind::PreconditionViolation, "extension from a boundary needs a complex with one simplex");
        const auto& u = nth_values(s, 0);
        g = extend_from_boundary(ss.front(), f, Point(u.begin(), u.end()));
        r.kv("method", "from boundary");
    } else {
        g = extend_over_subcomplex(make_vcomplex(complex_of(s, target)), f.domain, f);
        r.kv("method", "over subcomplex");
    }
    std::string dom = fl.doc ? b.complex("extended", g.domain.all_simplexes()) : "";
    emit_map(r, b, "extension", dom, g, fl.doc);
    return finish(r, b, fl.doc, exit_code::ok);
}

inline CommandResult cmd_lp(const Scene& s, const CommandFlags&)
{
    if (s.polyhedra.empty())
        fail(ErrorKind::UnresolvedReference, "scene has no polyhedron");
    Report r;
    const auto& obj = nth_values(s, 0);
    LPOutcome o = lp_solve(obj, s.polyhedron(s.polyhedra.front().name));
    switch (o.status) {
    case LPOutcome::Status::Optimal:
        r.kv("status", "optimal");
        r.kv("value", scalar_token(o.value));
        r.kv("point", points_text(o.point));
        break;
    case LPOutcome::Status::Unbounded:
        r.kv("status", "unbounded");
        break;
    case LPOutcome::Status::Infeasible:
        r.kv("status", "infeasible");
        break;
    }
    return {r.str(), exit_code::ok};
}

inline const std::map<std::string, Handler>& handlers()
{
    static const std::map<std::string, Handler> table = {
        {"validate", cmd_validate}, {"st", cmd_st},       {"prism", cmd_prism},   {"subdivide", cmd_subdivide},
        {"gooddir", cmd_gooddir},   {"lift", cmd_lift},   {"triangulate", cmd_triangulate},
        {"hausdorff", cmd_hausdorff}, {"hauslim", cmd_hauslim}, {"type", cmd_type}, {"homeo", cmd_homeo},
        {"extend", cmd_extend},     {"verify", cmd_verify}, {"lp", cmd_lp}};
    return table;
}

} // namespace detail

inline std::vector<std::string> command_names()
{
    std::vector<std::string> out;
    for (const auto& [name, h] : detail::handlers())
        out.push_back(name);
    return out;
}

/// Runs a command on scene text; errors become reports with the matching exit code.
inline CommandResult run_command(const std::string& command, std::string_view scene_text, const CommandFlags& flags)
{
    auto it = detail::handlers().find(command);
    if (it == detail::handlers().end())
        return {"error: unknown command '" + command + "'\n", exit_code::parse_error};
    Scene scene;
    try {
        scene = parse_scene(scene_text);
    } catch (const Error& e) {
        return {std::string("error: ") + e.what() + '\n',
                e.kind() == ErrorKind::ResourceLimit ? exit_code::resource_limit : exit_code::parse_error};
    }
    try {
        return it->second(scene, flags);
    } catch (const Error& e) {
        int code = exit_code::check_failed;
        if (e.kind() == ErrorKind::ResourceLimit)
            code = exit_code::resource_limit;
        else if (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::UnresolvedReference)
            code = exit_code::parse_error;
        return {std::string("error: ") + e.what() + '\n', code};
    }
}

} // namespace vtri
