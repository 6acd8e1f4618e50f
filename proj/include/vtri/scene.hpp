#pragma once

#include "pipeline.hpp"

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace vtri {

// Scene files are line based; '#' starts a comment. Scalars are single
// whitespace-free tokens in the scalar grammar.
//
//   dim 2
//   point a 0 0
//   point b 1 e
//   simplex s a b c
//   complex Y s t
//   subset diag closed d1 open d2
//   map f Y
//     a : 0
//     b : 1/2
//   end
//   multi F Y f g
//   family X s
//   polyhedron P
//     row 1 0 <= 1
//   end
//   values r 0 e

class SceneError : public Error {
public:
    SceneError(ErrorKind kind, std::size_t line, std::size_t column, const std::string& msg)
        : Error(kind, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
          line(line), column(column)
    {
    }

    std::size_t line, column;
};

struct SceneSimplex {
    std::string name;
    std::vector<std::string> vertices;
    bool operator==(const SceneSimplex&) const = default;
};

struct SceneComplex {
    std::string name;
    std::vector<std::string> simplexes;
    bool operator==(const SceneComplex&) const = default;
};

struct SceneSubset {
    std::string name;
    std::vector<std::string> closed, open;
    bool operator==(const SceneSubset&) const = default;
};

struct SceneMap {
    std::string name;
    std::string complex;
    std::vector<std::pair<std::string, Point>> images;
    bool operator==(const SceneMap&) const = default;
};

struct SceneMulti {
    std::string name;
    std::string base;
    std::vector<std::string> members;
    bool operator==(const SceneMulti&) const = default;
};

struct SceneFamily {
    std::string name;
    std::vector<std::string> simplexes;
    bool operator==(const SceneFamily&) const = default;
};

struct SceneRow {
    Point normal;
    std::string relation;
    FieldElement rhs;
    bool operator==(const SceneRow&) const = default;
};

struct ScenePolyhedron {
    std::string name;
    std::vector<SceneRow> rows;
    bool operator==(const ScenePolyhedron&) const = default;
};

struct SceneValues {
    std::string name;
    std::vector<FieldElement> values;
    bool operator==(const SceneValues&) const = default;
};

struct Scene {
    std::size_t dim = 0;
    std::vector<std::pair<std::string, Point>> points;
    std::vector<SceneSimplex> simplexes;
    std::vector<SceneComplex> complexes;
    std::vector<SceneSubset> subsets;
    std::vector<SceneMap> maps;
    std::vector<SceneMulti> multis;
    std::vector<SceneFamily> families;
    std::vector<ScenePolyhedron> polyhedra;
    std::vector<SceneValues> values;

    bool operator==(const Scene&) const = default;

    const Point& point(const std::string& name) const { return find(points, name, "point").second; }

    Simplex simplex(const std::string& name) const
    {
        std::vector<Point> pts;
        for (const auto& v : find(simplexes, name, "simplex").vertices)
            pts.push_back(point(v));
        return Simplex::make(std::move(pts));
    }

    std::vector<Simplex> complex_simplexes(const std::string& name) const
    {
        std::vector<Simplex> out;
        for (const auto& s : find(complexes, name, "complex").simplexes)
            out.push_back(simplex(s));
        return out;
    }

    MarkedSet subset(const std::string& name) const
    {
        const auto& s = find(subsets, name, "subset");
        MarkedSet m{name, {}, {}};
        for (const auto& c : s.closed)
            m.closed.push_back(simplex(c));
        for (const auto& o : s.open)
            m.open.push_back(simplex(o));
        return m;
    }

    std::vector<MarkedSet> all_subsets() const
    {
        std::vector<MarkedSet> out;
        for (const auto& s : subsets)
            out.push_back(subset(s.name));
        return out;
    }

    PLMap map(const std::string& name) const
    {
        const auto& m = find(maps, name, "map");
        Complex d = Complex::from_simplexes(complex_simplexes(m.complex));
        std::map<Point, const Point*, PointLess> table;
        std::size_t codim = 0;
        for (const auto& [v, img] : m.images) {
            table[point(v)] = &img;
            codim = img.size();
        }
        std::vector<Point> imgs;
        for (const auto& v : d.vertices()) {
            auto it = table.find(v);
            if (it == table.end())
                fail(ErrorKind::UnresolvedReference, "map " + name + " has no image for " + to_string(v));
            if (it->second->size() != codim)
                fail(ErrorKind::DimensionMismatch, "map " + name + " has images of different dimensions");
            imgs.push_back(*it->second);
        }
        return PLMap(std::move(d), std::move(imgs), codim);
    }

    Multifunction multi(const std::string& name) const
    {
        const auto& m = find(multis, name, "multifunction");
        Multifunction f{Complex::from_simplexes(complex_simplexes(m.base)), {}};
        for (const auto& g : m.members)
            f.members.push_back(map(g));
        return f;
    }

    std::vector<Simplex> family(const std::string& name) const
    {
        std::vector<Simplex> out;
        for (const auto& s : find(families, name, "family").simplexes)
            out.push_back(simplex(s));
        return out;
    }

    Polyhedron polyhedron(const std::string& name) const
    {
        Polyhedron p(dim);
        for (const auto& r : find(polyhedra, name, "polyhedron").rows) {
            Point neg = FieldElement(-1) * r.normal;
            if (r.relation == "<=")
                p.add(r.normal, r.rhs);
            else if (r.relation == "<")
                p.add(r.normal, r.rhs, true);
            else if (r.relation == ">=")
                p.add(neg, -r.rhs);
            else if (r.relation == ">")
                p.add(neg, -r.rhs, true);
            else
                p.add_equality(r.normal, r.rhs);
        }
        return p;
    }

    const std::vector<FieldElement>& value_list(const std::string& name) const
    {
        return find(values, name, "values").values;
    }

    bool has_values(const std::string& name) const
    {
        return std::any_of(values.begin(), values.end(), [&](const SceneValues& v) { return v.name == name; });
    }

    bool has_complex(const std::string& name) const
    {
        return std::any_of(complexes.begin(), complexes.end(), [&](const SceneComplex& c) { return c.name == name; });
    }

    bool has_map(const std::string& name) const
    {
        return std::any_of(maps.begin(), maps.end(), [&](const SceneMap& m) { return m.name == name; });
    }

private:
    template <class T>
    static const std::string& name_of(const T& x)
    {
        if constexpr (requires { x.first; })
            return x.first;
        else
            return x.name;
    }

    template <class T>
    static const T& find(const std::vector<T>& xs, const std::string& name, const std::string& kind)
    {
        for (const auto& x : xs)
            if (name_of(x) == name)
                return x;
        fail(ErrorKind::UnresolvedReference, "no " + kind + " named " + name);
    }
};

namespace detail {

struct Token {
    std::string text;
    std::size_t column;
};

inline std::vector<Token> split_line(const std::string& line)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#')
            break;
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#')
            ++i;
        out.push_back({line.substr(start, i - start), start + 1});
    }
    return out;
}

class SceneParser {
public:
    explicit SceneParser(std::string_view text) : text_(text) {}

    Scene run()
    {
        std::istringstream in{std::string(text_)};
        std::string line;
        while (std::getline(in, line)) {
            ++line_no_;
            auto toks = split_line(line);
            if (toks.empty())
                continue;
            if (block_) {
                block_line(toks);
                continue;
            }
            directive(toks);
        }
        if (block_)
            error(ErrorKind::ParseError, block_line_, 1, "block is missing its end");
        resolve();
        return std::move(scene_);
    }

private:
    enum class Kind { Point, Simplex, Complex, Subset, Map, Multi, Family, Polyhedron, Values };

    struct Reference {
        std::string name;
        Kind kind;
        std::size_t line, column;
    };

    [[noreturn]] void error(ErrorKind kind, std::size_t line, std::size_t column, const std::string& msg) const
    {
        throw SceneError(kind, line, column, msg);
    }

    [[noreturn]] void error(ErrorKind kind, const Token& t, const std::string& msg) const
    {
        error(kind, line_no_, t.column, msg);
    }

    FieldElement scalar(const Token& t) const
    {
        try {
            return parse_scalar(t.text);
        } catch (const Error& e) {
            error(ErrorKind::ParseError, t, "bad scalar '" + t.text + "': " + e.what());
        }
    }

    Point scalars(const std::vector<Token>& toks, std::size_t from) const
    {
        Point p;
        for (std::size_t i = from; i < toks.size(); ++i)
            p.push_back(scalar(toks[i]));
        return p;
    }

    void declare(const Token& t, Kind kind)
    {
        if (t.text.empty() || !std::isalpha(static_cast<unsigned char>(t.text[0])) ||
            !std::all_of(t.text.begin(), t.text.end(),
                         [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }))
            error(ErrorKind::ParseError, t, "bad name '" + t.text + "'");
        if (t.text == "e" || t.text == "end")
            error(ErrorKind::ParseError, t, "reserved name '" + t.text + "'");
        if (!names_.emplace(t.text, kind).second)
            error(ErrorKind::ParseError, t, "duplicate name '" + t.text + "'");
    }

    void refer(const Token& t, Kind kind) { refs_.push_back({t.text, kind, line_no_, t.column}); }

    void need(const std::vector<Token>& toks, std::size_t n, const std::string& usage) const
    {
        if (toks.size() < n)
            error(ErrorKind::ParseError, toks[0], "expected " + usage);
    }

    void directive(const std::vector<Token>& toks)
    {
        const std::string& d = toks[0].text;
        if (d == "dim") {
            need(toks, 2, "dim N");
            if (toks.size() != 2 || !std::all_of(toks[1].text.begin(), toks[1].text.end(), ::isdigit))
                error(ErrorKind::ParseError, toks[1], "dimension must be a natural number");
            if (seen_dim_)
                error(ErrorKind::ParseError, toks[0], "dimension given twice");
            scene_.dim = std::stoul(toks[1].text);
            seen_dim_ = true;
        } else if (d == "point") {
            need(toks, 2, "point NAME COORDS");
            if (!seen_dim_)
                error(ErrorKind::ParseError, toks[0], "dim must come before the first point");
            declare(toks[1], Kind::Point);
            Point p = scalars(toks, 2);
            if (p.size() != scene_.dim)
                error(ErrorKind::DimensionMismatch, toks[1],
                      "point " + toks[1].text + " has " + std::to_string(p.size()) + " coordinates, expected " +
                          std::to_string(scene_.dim));
            scene_.points.emplace_back(toks[1].text, std::move(p));
        } else if (d == "simplex") {
            need(toks, 3, "simplex NAME POINTS");
            declare(toks[1], Kind::Simplex);
            SceneSimplex s{toks[1].text, {}};
            for (std::size_t i = 2; i < toks.size(); ++i) {
                refer(toks[i], Kind::Point);
                s.vertices.push_back(toks[i].text);
            }
            scene_.simplexes.push_back(std::move(s));
        } else if (d == "complex" || d == "family") {
            need(toks, 3, d + " NAME SIMPLEXES");
            bool fam = d == "family";
            declare(toks[1], fam ? Kind::Family : Kind::Complex);
            std::vector<std::string> ss;
            for (std::size_t i = 2; i < toks.size(); ++i) {
                refer(toks[i], Kind::Simplex);
                ss.push_back(toks[i].text);
            }
            if (fam)
                scene_.families.push_back({toks[1].text, std::move(ss)});
            else
                scene_.complexes.push_back({toks[1].text, std::move(ss)});
        } else if (d == "subset") {
            need(toks, 3, "subset NAME [closed|open] SIMPLEXES");
            declare(toks[1], Kind::Subset);
            SceneSubset s{toks[1].text, {}, {}};
            bool open = false;
            for (std::size_t i = 2; i < toks.size(); ++i) {
                if (toks[i].text == "closed" || toks[i].text == "open") {
                    open = toks[i].text == "open";
                    continue;
                }
                refer(toks[i], Kind::Simplex);
                (open ? s.open : s.closed).push_back(toks[i].text);
            }
            scene_.subsets.push_back(std::move(s));
        } else if (d == "map") {
            if (toks.size() != 3)
                error(ErrorKind::ParseError, toks[0], "expected map NAME COMPLEX");
            declare(toks[1], Kind::Map);
            refer(toks[2], Kind::Complex);
            scene_.maps.push_back({toks[1].text, toks[2].text, {}});
            open_block(Kind::Map);
        } else if (d == "multi") {
            need(toks, 4, "multi NAME BASE MAPS");
            declare(toks[1], Kind::Multi);
            refer(toks[2], Kind::Complex);
            SceneMulti m{toks[1].text, toks[2].text, {}};
            for (std::size_t i = 3; i < toks.size(); ++i) {
                refer(toks[i], Kind::Map);
                m.members.push_back(toks[i].text);
            }
            scene_.multis.push_back(std::move(m));
        } else if (d == "polyhedron") {
            if (toks.size() != 2)
                error(ErrorKind::ParseError, toks[0], "expected polyhedron NAME");
            declare(toks[1], Kind::Polyhedron);
            scene_.polyhedra.push_back({toks[1].text, {}});
            open_block(Kind::Polyhedron);
        } else if (d == "values") {
            need(toks, 2, "values NAME SCALARS");
            declare(toks[1], Kind::Values);
            Point v = scalars(toks, 2);
            scene_.values.push_back({toks[1].text, std::vector<FieldElement>(v.begin(), v.end())});
        } else if (d == "end") {
            error(ErrorKind::ParseError, toks[0], "end outside a block");
        } else {
            error(ErrorKind::ParseError, toks[0], "unknown directive '" + d + "'");
        }
    }

    void open_block(Kind k)
    {
        block_ = k;
        block_line_ = line_no_;
    }

    void block_line(const std::vector<Token>& toks)
    {
        if (toks[0].text == "end") {
            if (toks.size() != 1)
                error(ErrorKind::ParseError, toks[1], "unexpected text after end");
            block_.reset();
            return;
        }
        if (*block_ == Kind::Map) {
            if (toks.size() < 3 || toks[1].text != ":")
                error(ErrorKind::ParseError, toks[0], "expected POINT : IMAGE");
            refer(toks[0], Kind::Point);
            auto& m = scene_.maps.back();
            for (const auto& [v, img] : m.images)
                if (v == toks[0].text)
                    error(ErrorKind::ParseError, toks[0], "second image for " + v);
            m.images.emplace_back(toks[0].text, scalars(toks, 2));
            return;
        }
        // polyhedron row: row c_1 ... c_dim REL rhs
        if (toks[0].text != "row" || toks.size() != scene_.dim + 3)
            error(ErrorKind::ParseError, toks[0],
                  "expected row with " + std::to_string(scene_.dim) + " coefficients, a relation and a bound");
        const Token& rel = toks[scene_.dim + 1];
        static const std::set<std::string> rels = {"<=", "<", "=", ">=", ">"};
        if (!rels.count(rel.text))
            error(ErrorKind::ParseError, rel, "unknown relation '" + rel.text + "'");
        SceneRow r;
        for (std::size_t i = 1; i <= scene_.dim; ++i)
            r.normal.push_back(scalar(toks[i]));
        r.relation = rel.text;
        r.rhs = scalar(toks[scene_.dim + 2]);
        scene_.polyhedra.back().rows.push_back(std::move(r));
    }

    void resolve() const
    {
        static const std::map<Kind, std::string> label = {
            {Kind::Point, "point"},   {Kind::Simplex, "simplex"}, {Kind::Complex, "complex"},
            {Kind::Subset, "subset"}, {Kind::Map, "map"},         {Kind::Multi, "multifunction"},
            {Kind::Family, "family"}, {Kind::Polyhedron, "polyhedron"}, {Kind::Values, "values"}};
        for (const auto& r : refs_) {
            auto it = names_.find(r.name);
            if (it == names_.end())
                error(ErrorKind::UnresolvedReference, r.line, r.column, "no " + label.at(r.kind) + " named " + r.name);
            if (it->second != r.kind)
                error(ErrorKind::UnresolvedReference, r.line, r.column,
                      r.name + " is a " + label.at(it->second) + ", not a " + label.at(r.kind));
        }
    }

    std::string_view text_;
    Scene scene_;
    bool seen_dim_ = false;
    std::size_t line_no_ = 0;
    std::optional<Kind> block_;
    std::size_t block_line_ = 0;
    std::map<std::string, Kind> names_;
    std::vector<Reference> refs_;
};

} // namespace detail

inline Scene parse_scene(std::string_view text) { return detail::SceneParser(text).run(); }

/// Scalar as a single token of the scalar grammar.
inline std::string scalar_token(const FieldElement& x)
{
    std::string s = x.str();
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    return s;
}

inline std::string print_scene(const Scene& s)
{
    std::ostringstream out;
    auto list = [&](const std::vector<std::string>& xs) {
        for (const auto& x : xs)
            out << ' ' << x;
    };
    auto scalars = [&](const auto& xs) {
        for (const auto& x : xs)
            out << ' ' << scalar_token(x);
    };
    out << "dim " << s.dim << '\n';
    for (const auto& [name, p] : s.points) {
        out << "point " << name;
        scalars(p);
        out << '\n';
    }
    for (const auto& x : s.simplexes) {
        out << "simplex " << x.name;
        list(x.vertices);
        out << '\n';
    }
    for (const auto& c : s.complexes) {
        out << "complex " << c.name;
        list(c.simplexes);
        out << '\n';
    }
    for (const auto& x : s.subsets) {
        out << "subset " << x.name;
        if (!x.closed.empty()) {
            out << " closed";
            list(x.closed);
        }
        if (!x.open.empty()) {
            out << " open";
            list(x.open);
        }
        out << '\n';
    }
    for (const auto& m : s.maps) {
        out << "map " << m.name << ' ' << m.complex << '\n';
        for (const auto& [v, img] : m.images) {
            out << "  " << v << " :";
            scalars(img);
            out << '\n';
        }
        out << "end\n";
    }
    for (const auto& m : s.multis) {
        out << "multi " << m.name << ' ' << m.base;
        list(m.members);
        out << '\n';
    }
    for (const auto& f : s.families) {
        out << "family " << f.name;
        list(f.simplexes);
        out << '\n';
    }
    for (const auto& p : s.polyhedra) {
        out << "polyhedron " << p.name << '\n';
        for (const auto& r : p.rows) {
            out << "  row";
            scalars(r.normal);
            out << ' ' << r.relation << ' ' << scalar_token(r.rhs) << '\n';
        }
        out << "end\n";
    }
    for (const auto& v : s.values) {
        out << "values " << v.name;
        scalars(v.values);
        out << '\n';
    }
    return out.str();
}

/// Adds computed objects to a scene, naming new points and simplexes.
class SceneBuilder {
public:
    explicit SceneBuilder(Scene s = {}) : scene_(std::move(s))
    {
        for (const auto& [n, p] : scene_.points) {
            points_.emplace(p, n);
            used_.insert(n);
        }
        for (const auto& x : scene_.simplexes) {
            simplexes_.emplace(sorted(x.vertices), x.name);
            used_.insert(x.name);
        }
        for (const auto& x : scene_.complexes)
            used_.insert(x.name);
        for (const auto& x : scene_.subsets)
            used_.insert(x.name);
        for (const auto& x : scene_.maps)
            used_.insert(x.name);
        for (const auto& x : scene_.multis)
            used_.insert(x.name);
        for (const auto& x : scene_.families)
            used_.insert(x.name);
        for (const auto& x : scene_.polyhedra)
            used_.insert(x.name);
        for (const auto& x : scene_.values)
            used_.insert(x.name);
    }

    std::string point(const Point& p)
    {
        auto it = points_.find(p);
        if (it != points_.end())
            return it->second;
        if (scene_.points.empty() && scene_.dim == 0)
            scene_.dim = p.size();
        if (p.size() != scene_.dim)
            fail(ErrorKind::DimensionMismatch, "point " + to_string(p) + " in a scene of dimension " +
                                                   std::to_string(scene_.dim));
        std::string n = fresh("v");
        points_.emplace(p, n);
        scene_.points.emplace_back(n, p);
        return n;
    }

    std::string simplex(const Simplex& s)
    {
        std::vector<std::string> vs;
        for (const auto& v : s.vertices)
            vs.push_back(point(v));
        auto key = sorted(vs);
        auto it = simplexes_.find(key);
        if (it != simplexes_.end())
            return it->second;
        std::string n = fresh("s");
        simplexes_.emplace(key, n);
        scene_.simplexes.push_back({n, vs});
        return n;
    }

    /// Declares a complex listing the given simplexes.
    std::string complex(const std::string& base, const std::vector<Simplex>& ss)
    {
        SceneComplex c{fresh(base), {}};
        for (const auto& s : ss)
            c.simplexes.push_back(simplex(s));
        scene_.complexes.push_back(c);
        return c.name;
    }

    std::string map(const std::string& base, const std::string& complex, const PLMap& f)
    {
        SceneMap m{fresh(base), complex, {}};
        for (std::size_t i = 0; i < f.images.size(); ++i)
            m.images.emplace_back(point(f.domain.vertex(static_cast<int>(i))), f.images[i]);
        scene_.maps.push_back(m);
        return m.name;
    }

    std::string values(const std::string& base, const std::vector<FieldElement>& xs)
    {
        SceneValues v{fresh(base), xs};
        scene_.values.push_back(v);
        return v.name;
    }

    const Scene& scene() const { return scene_; }

private:
    static std::vector<std::string> sorted(std::vector<std::string> v)
    {
        std::sort(v.begin(), v.end());
        return v;
    }

    std::string fresh(const std::string& base)
    {
        if (used_.insert(base).second && base != "v" && base != "s")
            return base;
        for (std::size_t i = 0;; ++i) {
            std::string n = base + std::to_string(i);
            if (used_.insert(n).second)
                return n;
        }
    }

    Scene scene_;
    std::map<Point, std::string, PointLess> points_;
    std::map<std::vector<std::string>, std::string> simplexes_;
    std::set<std::string> used_;
};

} // namespace vtri
