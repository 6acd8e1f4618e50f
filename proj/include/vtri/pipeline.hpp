#pragma once

#include "plmap.hpp"

#include <random>

namespace vtri {

/// A subset given as a union of closed and relatively open simplexes.
struct MarkedSet {
    std::string name;
    std::vector<Simplex> closed;
    std::vector<Simplex> open;

    bool contains(const Point& x) const
    {
        for (const auto& s : closed)
            if (vtri::contains(s, x))
                return true;
        for (const auto& s : open)
            if (contains_in_interior(s, x))
                return true;
        return false;
    }

    std::vector<Simplex> closure() const
    {
        std::vector<Simplex> out = closed;
        out.insert(out.end(), open.begin(), open.end());
        return out;
    }
};

inline bool in_union(const std::vector<Simplex>& ss, const Point& x)
{
    for (const auto& s : ss)
        if (contains(s, x))
            return true;
    return false;
}

/// phi is a simplexwise affine homeomorphism from |phi.domain| = X onto |k.base|,
/// carrying each simplex of its domain onto a simplex of k.
struct VTriangulation {
    std::vector<Simplex> domain;
    PLMap phi;
    VComplex k;
    /// st X -> |st k|
    PLMap phi_st;
};

/// Builds K, st K and the induced map from a simplexwise bijection.
inline VTriangulation make_vtriangulation(std::vector<Simplex> domain, PLMap phi)
{
    PLMap back = invert(phi);
    VComplex k = make_vcomplex(back.domain);
    PLMap st_back = induced_map(back, k);
    VTriangulation t{std::move(domain), std::move(phi), std::move(k), {}};
    t.phi_st = invert(st_back);
    return t;
}

inline VTriangulation identity_vtriangulation(std::vector<Simplex> domain, const Complex& k)
{
    return make_vtriangulation(std::move(domain), identity_map(k));
}

/// Vertex ids of K with each class of equal standard part contiguous:
/// classes by st coordinates, then members by coordinates.
inline std::vector<int> order_vertices_st_coherent(const VComplex& k)
{
    std::vector<int> ids(k.base.vertices().size());
    for (std::size_t i = 0; i < ids.size(); ++i)
        ids[i] = static_cast<int>(i);
    std::vector<Point> st;
    for (const auto& v : k.base.vertices())
        st.push_back(standard_part(v));
    std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
        int c = compare_points(st[static_cast<std::size_t>(a)], st[static_cast<std::size_t>(b)]);
        if (c != 0)
            return c < 0;
        return compare_points(k.base.vertex(a), k.base.vertex(b)) < 0;
    });
    return ids;
}

namespace detail {

inline Point append(const Point& p, const FieldElement& h)
{
    Point q = p;
    q.push_back(h);
    return q;
}

/// Groups values into classes of equal functions on a simplex, sorted by
/// their mean over the vertices; rows[f][i] is the value of f at vertex i.
inline std::vector<std::vector<std::size_t>> value_classes(const std::vector<std::vector<FieldElement>>& rows)
{
    std::vector<std::size_t> idx(rows.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    auto total = [&](std::size_t f) {
        FieldElement s;
        for (const auto& v : rows[f])
            s += v;
        return s;
    };
    std::vector<FieldElement> sums;
    for (std::size_t f = 0; f < rows.size(); ++f)
        sums.push_back(total(f));
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return sums[a] < sums[b]; });
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i == 0 || rows[idx[i]] != rows[idx[i - 1]])
            out.emplace_back();
        out.back().push_back(idx[i]);
    }
    return out;
}

/// Graph and band simplexes over the vertices a (already in the chosen
/// order) for functions given by their values there.
inline std::vector<std::vector<Point>> lift_over(const std::vector<Point>& a,
                                                 const std::vector<std::vector<FieldElement>>& rows)
{
    std::vector<std::vector<Point>> out;
    auto classes = value_classes(rows);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const auto& r = rows[classes[c][0]];
        for (const auto& s : prism_simplexes(a, r, r))
            out.push_back(s.vertices);
        if (c + 1 < classes.size())
            for (const auto& s : prism_simplexes(a, r, rows[classes[c + 1][0]]))
                out.push_back(s.vertices);
    }
    return out;
}

inline std::vector<FieldElement> random_weights(std::mt19937& rng, std::size_t m)
{
    std::uniform_int_distribution<long> d(1, 97);
    std::vector<long> raw(m);
    long sum = 0;
    for (auto& x : raw) {
        x = d(rng);
        sum += x;
    }
    std::vector<FieldElement> w;
    for (long x : raw)
        w.emplace_back(Rational(x, sum));
    return w;
}

} // namespace detail

class LiftingCheckFailed : public Error {
public:
    explicit LiftingCheckFailed(const std::string& msg) : Error(ErrorKind::LiftingCheckFailed, msg) {}
};

struct Lift {
    VTriangulation result;
    /// the lift built over Q from st K and the induced functions
    Complex m;
    std::size_t probes = 0;
};

inline std::size_t& lifting_probe_count()
{
    static std::size_t n = 100;
    return n;
}

/// Lifts (phi, K) to a V-triangulation of X^F; F's members live on phi's domain.
inline Lift lift_triangulation(const VTriangulation& t, const Multifunction& f, unsigned seed = 0)
{
    const Complex& d = t.phi.domain;
    const Complex& k = t.k.base;
    for (const auto& g : f.members)
        if (!(g.domain == d) || g.codim != 1)
            fail(ErrorKind::PreconditionViolation, "members must be real-valued maps on the domain of phi");
    // K vertex -> domain vertex
    std::vector<int> pre(k.vertices().size(), -1);
    for (std::size_t i = 0; i < d.vertices().size(); ++i) {
        auto id = k.vertex_id(t.phi.images[i]);
        if (!id)
            fail(ErrorKind::PreconditionViolation, "phi does not map vertices to vertices of K");
        pre[static_cast<std::size_t>(*id)] = static_cast<int>(i);
    }
    std::vector<int> order = order_vertices_st_coherent(t.k);
    std::vector<int> rank(order.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        rank[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    auto value = [&](std::size_t g, int kv) { return f.members[g].image(pre[static_cast<std::size_t>(kv)])[0]; };

    std::vector<Simplex> l_pieces, x_pieces;
    std::map<Point, Point, PointLess> psi;
    for (auto ids : k.simplexes()) {
        std::sort(ids.begin(), ids.end(), [&](int a, int b) { return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)]; });
        std::vector<Point> a, x;
        for (int v : ids) {
            a.push_back(k.vertex(v));
            x.push_back(d.vertex(pre[static_cast<std::size_t>(v)]));
        }
        std::vector<std::vector<FieldElement>> rows;
        for (std::size_t g = 0; g < f.members.size(); ++g) {
            rows.emplace_back();
            for (int v : ids)
                rows.back().push_back(value(g, v));
        }
        auto lifted = detail::lift_over(a, rows);
        auto below = detail::lift_over(x, rows);
        for (std::size_t i = 0; i < lifted.size(); ++i) {
            for (std::size_t j = 0; j < lifted[i].size(); ++j)
                psi.emplace(below[i][j], lifted[i][j]);
            l_pieces.emplace_back(std::move(lifted[i]));
            x_pieces.emplace_back(std::move(below[i]));
        }
    }
    Complex l = Complex::from_simplexes(l_pieces);
    Complex xf = Complex::from_simplexes(x_pieces);
    std::vector<Point> imgs;
    for (const auto& v : xf.vertices())
        imgs.push_back(psi.at(v));
    PLMap map(xf, std::move(imgs), k.ambient() + 1);

    // p o psi = phi o p at every vertex and at random points
    auto check_point = [&](const Point& y) {
        Point lhs = map.evaluate(y);
        lhs.pop_back();
        Point below(y.begin(), y.end() - 1);
        if (lhs != t.phi.evaluate(below))
            throw LiftingCheckFailed("p o psi and phi o p differ at " + to_string(y));
    };
    for (const auto& v : xf.vertices())
        check_point(v);
    std::mt19937 rng(seed);
    const auto& tops = xf.maximal();
    for (std::size_t i = 0; i < lifting_probe_count() && !tops.empty(); ++i) {
        const auto& s = tops[rng() % tops.size()];
        check_point(affine_combination(xf.simplex(s).vertices, detail::random_weights(rng, s.size())));
    }

    // the same construction over Q from st K and the induced functions
    std::vector<int> st_rank(t.k.st.vertices().size(), -1);
    std::vector<int> st_rep(t.k.st.vertices().size(), -1);
    for (int v : order) {
        auto sv = static_cast<std::size_t>(t.k.st_vertex[static_cast<std::size_t>(v)]);
        if (st_rank[sv] < 0) {
            st_rank[sv] = rank[static_cast<std::size_t>(v)];
            st_rep[sv] = v;
        }
    }
    std::vector<std::vector<FieldElement>> st_value(f.members.size());
    for (std::size_t g = 0; g < f.members.size(); ++g)
        for (std::size_t kv = 0; kv < k.vertices().size(); ++kv) {
            FieldElement sv = standard_part(value(g, static_cast<int>(kv)));
            auto a = static_cast<std::size_t>(t.k.st_vertex[kv]);
            if (st_value[g].size() <= a)
                st_value[g].resize(t.k.st.vertices().size());
            if (st_rep[a] != static_cast<int>(kv) && st_value[g][a] != sv)
                throw NotInduced(k.vertex(st_rep[a]), k.vertex(static_cast<int>(kv)), " for member " + std::to_string(g));
            st_value[g][a] = sv;
        }
    std::vector<Simplex> m_pieces;
    for (auto ids : t.k.st.simplexes()) {
        std::sort(ids.begin(), ids.end(), [&](int a, int b) { return st_rank[static_cast<std::size_t>(a)] < st_rank[static_cast<std::size_t>(b)]; });
        std::vector<Point> a;
        for (int v : ids)
            a.push_back(t.k.st.vertex(v));
        std::vector<std::vector<FieldElement>> rows;
        for (std::size_t g = 0; g < f.members.size(); ++g) {
            rows.emplace_back();
            for (int v : ids)
                rows.back().push_back(st_value[g][static_cast<std::size_t>(v)]);
        }
        for (auto& s : detail::lift_over(a, rows))
            m_pieces.emplace_back(std::move(s));
    }
    Complex m = Complex::from_simplexes(m_pieces);

    // st(L) = M simplex by simplex
    std::set<std::vector<Point>> st_l, m_set;
    for (const auto& s : l.all_simplexes()) {
        auto sv = distinct_st_vertices(s);
        std::sort(sv.begin(), sv.end(), PointLess{});
        st_l.insert(sv);
    }
    for (const auto& s : m.all_simplexes())
        m_set.insert(s.vertices);
    if (st_l != m_set)
        throw LiftingCheckFailed("st(L) differs from the lift over the standard parts");

    VComplex vl;
    try {
        vl = make_vcomplex(l);
    } catch (const Error& e) {
        throw LiftingCheckFailed(std::string("lifted complex is not a V-complex: ") + e.what());
    }
    bool identity = t.phi.images == d.vertices() && d == k;
    PLMap st_back = identity ? identity_map(t.k.st) : induced_map(invert(t.phi), t.k);
    std::vector<Simplex> st_side;
    for (const auto& s : m.maximal_simplexes()) {
        std::vector<Point> pts;
        for (const auto& v : s.vertices) {
            Point q = st_back.evaluate(Point(v.begin(), v.end() - 1));
            q.push_back(v.back());
            pts.push_back(std::move(q));
        }
        st_side.emplace_back(std::move(pts));
    }
    std::vector<Simplex> st_xf = st_of_simplex_union(xf.maximal_simplexes());
    auto member = [](const std::vector<Simplex>& ss, const std::vector<Box>& boxes, const Point& x) {
        Box b(Simplex({x}));
        for (std::size_t i = 0; i < ss.size(); ++i)
            if (boxes[i].meets(b) && contains(ss[i], x))
                return true;
        return false;
    };
    std::vector<Box> side_boxes, xf_boxes;
    for (const auto& s : st_side)
        side_boxes.emplace_back(s);
    for (const auto& s : st_xf)
        xf_boxes.emplace_back(s);
    for (const auto& v : xf.vertices())
        if (!member(st_side, side_boxes, standard_part(v)))
            throw LiftingCheckFailed("st of " + to_string(v) + " lies outside (st X)^(F_st)");
    for (const auto& s : st_side)
        for (const auto& v : s.vertices)
            if (!member(st_xf, xf_boxes, v))
                throw LiftingCheckFailed(to_string(v) + " lies outside st(X^F)");

    Lift out;
    out.result = VTriangulation{xf.maximal_simplexes(), map, vl, {}};
    out.result.phi_st = identity ? identity_map(vl.st) : invert(induced_map(invert(out.result.phi), vl));
    out.m = std::move(m);
    out.probes = lifting_probe_count();
    return out;
}

namespace detail {

/// A point of P where f and g differ, if any; P is a simplex of the base and
/// f, g live on the complex d.
inline std::optional<Point> difference_on(const Simplex& p, const PLMap& f, const PLMap& g)
{
    Polyhedron hp = polyhedron_of_simplex(p);
    for (const auto& delta : f.domain.maximal_simplexes()) {
        Box a(p), b(delta);
        if (!a.meets(b))
            continue;
        Polyhedron both = hp;
        for (const auto& r : polyhedron_of_simplex(delta).rows)
            both.rows.push_back(r);
        for (const auto& v : polyhedron_vertices(both))
            if (f.evaluate(v) != g.evaluate(v))
                return v;
    }
    return std::nullopt;
}

struct StarViolation {
    bool st_level;
    Simplex simplex;
    std::size_t first, second;
};

inline std::optional<StarViolation> star_violation(const VComplex& k, const Multifunction& m,
                                                   const std::vector<PLMap>& st_members)
{
    const Complex& d = m.member_domain();
    bool same = d == k.base;
    auto check = [&](const Complex& base, const std::vector<PLMap>& fs, bool st) -> std::optional<StarViolation> {
        for (const auto& ids : base.simplexes()) {
            Simplex p = base.simplex(ids);
            for (std::size_t a = 0; a < fs.size(); ++a)
                for (std::size_t b = a + 1; b < fs.size(); ++b) {
                    bool at_vertex = false;
                    for (const auto& v : p.vertices)
                        at_vertex = at_vertex || fs[a].evaluate(v) != fs[b].evaluate(v);
                    if (!at_vertex && difference_on(p, fs[a], fs[b]))
                        return StarViolation{st, p, a, b};
                }
        }
        return std::nullopt;
    };
    // on a common complex the members are affine on each simplex and both conditions hold
    if (same)
        return std::nullopt;
    if (auto v = check(k.base, m.members, false))
        return v;
    return check(k.st, st_members, true);
}

} // namespace detail

struct StarResult {
    VComplex k;
    Multifunction f;
    int rounds = 0;
};

inline int& max_subdivisions()
{
    static int n = 3;
    return n;
}

/// Flag-subdivides K until every pair of distinct members differs at a vertex
/// of each simplex, at both levels.
inline StarResult enforce_star_conditions(const VComplex& k, const Multifunction& f)
{
    if (!(f.base == k.base))
        fail(ErrorKind::PreconditionViolation, "multifunction base differs from the complex");
    StarResult r{k, f, 0};
    if (f.members.empty())
        return r;
    VComplex vd = make_vcomplex(f.member_domain());
    std::vector<PLMap> st_members;
    for (const auto& g : f.members)
        st_members.push_back(induced_map(g, vd));
    for (;;) {
        auto v = detail::star_violation(r.k, r.f, st_members);
        if (!v)
            return r;
        if (r.rounds >= max_subdivisions())
            fail(ErrorKind::ResourceLimit, std::string(v->st_level ? "st-level" : "base") + " condition fails on " +
                                               to_string(v->simplex) + " for members " + std::to_string(v->first) +
                                               " and " + std::to_string(v->second) + " after " +
                                               std::to_string(r.rounds) + " subdivisions");
        r.k = flag_subdivision(r.k);
        r.f.base = r.k.base;
        ++r.rounds;
    }
}


/// A cell of a vertical decomposition: an open simplex C in R^n with the
/// affine functions whose graphs make up T over C, sorted by value.
struct VerticalCell {
    Simplex closure;
    /// functions[j][i] is the value of the j-th function at vertex i of the closure
    std::vector<std::vector<FieldElement>> functions;
    /// graph_marks[j][s]: graph of function j lies in subset s (s = 0 is Y itself)
    std::vector<std::vector<bool>> graph_marks;
    /// band_marks[j][s]: open band between functions j and j+1 lies in subset s
    std::vector<std::vector<bool>> band_marks;
};

struct CellDecomposition {
    std::vector<VerticalCell> cells;
};

namespace detail {

inline std::vector<Simplex> facets(const Simplex& s)
{
    std::vector<Simplex> out;
    for (std::size_t i = 0; i < s.vertices.size(); ++i) {
        std::vector<Point> f;
        for (std::size_t j = 0; j < s.vertices.size(); ++j)
            if (j != i)
                f.push_back(s.vertices[j]);
        out.emplace_back(std::move(f));
    }
    return out;
}

/// Maximal simplexes among the faces of dimension below d of the pieces of Y and of the subsets.
inline std::vector<Simplex> low_skeleton(const std::vector<Simplex>& y, const std::vector<MarkedSet>& subsets,
                                         std::size_t d)
{
    std::vector<Simplex> all;
    auto add = [&](const Simplex& s) {
        if (static_cast<std::size_t>(s.dim()) < d)
            all.push_back(s);
        else
            for (auto& f : facets(s))
                all.push_back(std::move(f));
    };
    for (const auto& s : y)
        add(s);
    for (const auto& m : subsets)
        for (const auto& s : m.closure())
            add(s);
    return Complex::from_simplexes(all).maximal_simplexes();
}

inline Point drop_last(const Point& p) { return Point(p.begin(), p.end() - 1); }

inline Simplex project(const Simplex& s)
{
    Simplex r;
    for (const auto& v : s.vertices)
        r.vertices.push_back(drop_last(v));
    return r;
}

/// Last coordinate of the point of S over x, where x lies in the projection of S.
inline FieldElement height_over(const Simplex& s, const Simplex& shadow, const Point& x)
{
    auto w = affine_coordinates(shadow, x);
    FieldElement h;
    for (std::size_t i = 0; i < s.vertices.size(); ++i)
        h += (*w)[i] * s.vertices[i].back();
    return h;
}

/// Vertices of {lo <= h <= hi} on a simplex where h is affine with the given vertex values.
inline std::vector<Point> slab_points(const std::vector<Point>& a, const std::vector<FieldElement>& h,
                                      const FieldElement& lo, const FieldElement& hi)
{
    std::vector<Point> out;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (lo <= h[i] && h[i] <= hi)
            out.push_back(a[i]);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            for (const auto* level : {&lo, &hi}) {
                const FieldElement& c = *level;
                if ((h[i] < c && h[j] > c) || (h[i] > c && h[j] < c)) {
                    FieldElement t = (c - h[i]) / (h[j] - h[i]);
                    out.push_back(a[i] + t * (a[j] - a[i]));
                }
            }
    return unique_points(std::move(out));
}

} // namespace detail

/// Cells over which T, the faces of dimension < d of Y and the subsets, is
/// a union of graphs; requires the last unit vector to be a good direction.
inline CellDecomposition vertical_decomposition(const std::vector<Simplex>& y, const std::vector<MarkedSet>& subsets)
{
    if (y.empty())
        fail(ErrorKind::EmptySet, "nothing to decompose");
    const std::size_t d = y[0].ambient();
    if (d < 2)
        fail(ErrorKind::DimensionMismatch, "vertical decomposition needs dimension at least 2");
    std::vector<Simplex> t = detail::low_skeleton(y, subsets, d);
    Point up = unit_vector(d, d - 1);
    for (const auto& s : t)
        if (!is_good_direction(up, {s}))
            fail(ErrorKind::BadDirection, "vertical direction lies in the direction space of " + to_string(s));
    std::vector<Simplex> shadows;
    for (const auto& s : t)
        shadows.push_back(detail::project(s));
    std::vector<std::pair<Point, FieldElement>> planes;
    for (const auto& s : shadows)
        for (auto& h : supporting_hyperplanes(s))
            planes.push_back(std::move(h));
    std::vector<Cell> start;
    for (const auto& s : shadows)
        start.push_back(cell_of_simplex(s));
    std::vector<Simplex> pieces;
    for (const auto& c : cut_cells(start, planes))
        for (auto& s : pulling_triangulation(c))
            pieces.push_back(std::move(s));
    Complex arrangement = Complex::from_simplexes(pieces);

    CellDecomposition out;
    for (const auto& c : arrangement.all_simplexes()) {
        VerticalCell cell{c, {}, {}, {}};
        Point mid = c.barycenter();
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!contains(shadows[i], mid))
                continue;
            std::vector<FieldElement> vals;
            for (const auto& v : c.vertices)
                vals.push_back(detail::height_over(t[i], shadows[i], v));
            cell.functions.push_back(std::move(vals));
        }
        std::sort(cell.functions.begin(), cell.functions.end());
        cell.functions.erase(std::unique(cell.functions.begin(), cell.functions.end()), cell.functions.end());
        auto classes = detail::value_classes(cell.functions);
        std::vector<std::vector<FieldElement>> sorted;
        for (const auto& cl : classes)
            sorted.push_back(cell.functions[cl[0]]);
        cell.functions = std::move(sorted);
        auto at_mid = [&](const std::vector<FieldElement>& f) {
            FieldElement s;
            for (const auto& v : f)
                s += v;
            return s / FieldElement(static_cast<long>(f.size()));
        };
        auto marks = [&](const Point& x) {
            std::vector<bool> m{in_union(y, x)};
            for (const auto& sub : subsets)
                m.push_back(sub.contains(x));
            return m;
        };
        for (std::size_t j = 0; j < cell.functions.size(); ++j) {
            FieldElement h = at_mid(cell.functions[j]);
            cell.graph_marks.push_back(marks(detail::append(mid, h)));
            if (j + 1 < cell.functions.size())
                cell.band_marks.push_back(marks(detail::append(mid, (h + at_mid(cell.functions[j + 1])) / 2)));
        }
        out.cells.push_back(std::move(cell));
    }
    return out;
}

namespace detail {

/// Vertices and differences g - f on a maximal simplex of K.
inline std::pair<std::vector<Point>, std::vector<FieldElement>> differences(const Complex& k, const VertexSet& ids,
                                                                            const PLMap& f, const PLMap& g)
{
    std::vector<Point> pts;
    std::vector<FieldElement> h;
    for (int v : ids) {
        pts.push_back(k.vertex(v));
        h.push_back(g.image(v)[0] - f.image(v)[0]);
    }
    return {std::move(pts), std::move(h)};
}

/// st of {|g - f| <= bound} over K, as simplexes over Q; bound 0 gives the
/// exact agreement set.
inline std::vector<Simplex> st_of_slab(const Complex& k, const PLMap& f, const PLMap& g, const FieldElement& bound)
{
    std::vector<Simplex> out;
    for (const auto& ids : k.maximal()) {
        auto [pts, h] = differences(k, ids, f, g);
        auto z = slab_points(pts, h, -bound, bound);
        if (z.empty())
            continue;
        for (auto& p : z)
            p = standard_part(p);
        for (auto& s : triangulate_hull(z))
            out.push_back(std::move(s));
    }
    return out;
}

/// {f_st = g_st} over st K for the induced maps.
inline std::vector<Simplex> st_agreement(const VComplex& k, const PLMap& f_st, const PLMap& g_st)
{
    return st_of_slab(k.st, f_st, g_st, FieldElement());
}

} // namespace detail

/// Infinitesimal e0 with st{|f - g| <= e0} = {f_st = g_st} for every pair of
/// members; members are maps on K. Scans e^N downward from one past the
/// largest valuation of an infinitesimal difference, then tries the largest
/// infinitesimal difference itself and its double.
inline FieldElement epsilon0_witness(const VComplex& k, const std::vector<PLMap>& members)
{
    std::vector<PLMap> st_members;
    for (const auto& f : members)
        st_members.push_back(induced_map(f, k));
    long top = 0;
    FieldElement largest;
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
            for (std::size_t v = 0; v < k.base.vertices().size(); ++v) {
                FieldElement h = members[b].images[v][0] - members[a].images[v][0];
                if (!h.is_zero() && h.is_infinitesimal()) {
                    top = std::max<long>(top, h.valuation());
                    largest = max(largest, abs(h));
                }
            }
    std::vector<FieldElement> candidates;
    for (long n = top + 1; n >= 1; --n)
        candidates.push_back(power(FieldElement::epsilon(), n));
    if (!largest.is_zero()) {
        candidates.push_back(largest);
        candidates.push_back(2 * largest);
    }
    std::vector<std::vector<Simplex>> target;
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
            target.push_back(detail::st_agreement(k, st_members[a], st_members[b]));
    for (const auto& e0 : candidates) {
        bool ok = true;
        std::size_t pair = 0;
        for (std::size_t a = 0; a < members.size() && ok; ++a)
            for (std::size_t b = a + 1; b < members.size() && ok; ++b)
                ok = same_union(detail::st_of_slab(k.base, members[a], members[b], e0), target[pair++]);
        if (ok)
            return e0;
    }
    fail(ErrorKind::VerificationFailed, "no candidate e0 makes the closeness sets match the agreement sets");
}

inline std::size_t& dimension_cap()
{
    static std::size_t cap = 3;
    return cap;
}

struct TriangulationStats {
    std::size_t levels = 0;
    std::size_t members = 0;
    std::size_t star_rounds = 0;
    std::size_t lifted_simplexes = 0;
};

namespace detail {

inline VComplex triangulate_line(const std::vector<Simplex>& y, const std::vector<MarkedSet>& subsets)
{
    std::vector<Point> cuts;
    auto add = [&](const Simplex& s) {
        for (const auto& v : s.vertices)
            cuts.push_back(v);
    };
    for (const auto& s : y)
        add(s);
    for (const auto& m : subsets)
        for (const auto& s : m.closure())
            add(s);
    cuts = unique_points(std::move(cuts));
    std::vector<Point> kept;
    for (const auto& c : cuts)
        if (in_union(y, c))
            kept.push_back(c);
    std::vector<Simplex> out;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        out.push_back(Simplex({kept[i]}));
        if (i + 1 < kept.size()) {
            Point mid = FieldElement(Rational(1, 2)) * (kept[i] + kept[i + 1]);
            if (in_union(y, mid))
                out.push_back(Simplex({kept[i], kept[i + 1]}));
        }
    }
    return make_vcomplex(Complex::from_simplexes(out));
}

inline std::vector<Simplex> closed_simplexes(const Complex& k) { return k.maximal_simplexes(); }

inline MarkedSet closed_set(std::vector<Simplex> ss)
{
    MarkedSet m;
    m.closed = std::move(ss);
    return m;
}

/// Members on K extending the functions of T over its shadows. Pieces of T
/// are merged into one sheet while they agree on every common vertex of K
/// and keep equal standard parts at vertices with equal standard parts.
/// Away from its own shadow a sheet takes the values of the first sheet
/// infinitely close by, or 0.
inline std::vector<PLMap> sheet_functions(const VComplex& k, const std::vector<Simplex>& t)
{
    struct Sheet {
        std::map<int, FieldElement> values;
        std::set<VertexSet> simplexes;
    };
    auto to_near = [&](const Sheet& sh) {
        std::vector<Simplex> over;
        for (const auto& ids : sh.simplexes)
            over.push_back(k.base.simplex(ids));
        Complex l = Complex::from_simplexes(over);
        std::vector<Point> vals;
        for (const auto& v : l.vertices())
            vals.push_back(Point{sh.values.at(*k.base.vertex_id(v))});
        return near_values(k, l, PLMap(l, std::move(vals), 1));
    };
    std::vector<Sheet> sheets;
    for (const auto& s : t) {
        Simplex shadow = project(s);
        Box box(shadow);
        Sheet piece;
        for (const auto& ids : k.base.simplexes()) {
            Simplex c = k.base.simplex(ids);
            if (!box.meets(Box(c)) || !contains(shadow, c.barycenter()))
                continue;
            piece.simplexes.insert(ids);
            for (std::size_t i = 0; i < ids.size(); ++i)
                piece.values.emplace(ids[i], height_over(s, shadow, c.vertices[i]));
        }
        bool merged = false;
        for (auto& sh : sheets) {
            bool agree = true;
            for (const auto& [v, h] : piece.values) {
                auto it = sh.values.find(v);
                if (it != sh.values.end() && it->second != h) {
                    agree = false;
                    break;
                }
            }
            if (!agree)
                continue;
            // vertices with equal standard parts need values with equal standard parts
            std::map<int, FieldElement> st_values;
            for (const auto* part : {&sh.values, &piece.values})
                for (const auto& [v, h] : *part) {
                    auto [it, fresh] = st_values.emplace(k.st_vertex[static_cast<std::size_t>(v)], standard_part(h));
                    agree = agree && (fresh || it->second == standard_part(h));
                }
            if (!agree)
                continue;
            sh.values.insert(piece.values.begin(), piece.values.end());
            sh.simplexes.insert(piece.simplexes.begin(), piece.simplexes.end());
            merged = true;
            break;
        }
        if (!merged)
            sheets.push_back(std::move(piece));
    }
    // far from its own shadow a sheet follows the first sheet that is near
    std::vector<std::vector<std::optional<Point>>> near;
    for (const auto& sh : sheets)
        near.push_back(to_near(sh));
    std::vector<PLMap> out;
    for (std::size_t i = 0; i < sheets.size(); ++i) {
        std::vector<Point> vals;
        for (std::size_t v = 0; v < k.base.vertices().size(); ++v) {
            std::optional<Point> x = near[i][v];
            for (std::size_t j = 0; j < near.size() && !x; ++j)
                x = near[j][v];
            vals.push_back(x ? *x : Point(1));
        }
        PLMap f(k.base, std::move(vals), 1);
        if (auto w = inducement_failure(f, true))
            throw NotInduced(w->first, w->second, " for a sheet of T");
        out.push_back(std::move(f));
    }
    return out;
}

/// Pairs whose exact agreement set does not already have the standard
/// agreement set as its standard part; only these need closeness sets.
inline std::vector<bool> pairs_needing_closeness(const VComplex& k, const std::vector<PLMap>& members)
{
    std::vector<PLMap> st_members;
    for (const auto& f : members)
        st_members.push_back(induced_map(f, k));
    std::vector<bool> out;
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
            out.push_back(!same_union(st_of_slab(k.base, members[a], members[b], FieldElement()),
                                      st_agreement(k, st_members[a], st_members[b])));
    return out;
}

/// Sets {f = g}, and {|f - g| <= e0} where needed, on each simplex of K when proper.
inline std::vector<MarkedSet> agreement_sets(const VComplex& k, const std::vector<PLMap>& members,
                                             const std::vector<bool>& need, const FieldElement& e0)
{
    std::vector<MarkedSet> out;
    for (const auto& ids : k.base.maximal()) {
        std::size_t pair = 0;
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b, ++pair) {
                auto [pts, h] = differences(k.base, ids, members[a], members[b]);
                std::vector<FieldElement> bounds{FieldElement()};
                if (need[pair])
                    bounds.push_back(e0);
                for (const auto& bound : bounds) {
                    bool whole = true;
                    for (const auto& x : h)
                        whole = whole && abs(x) <= bound;
                    if (whole)
                        continue;
                    auto z = slab_points(pts, h, -bound, bound);
                    if (!z.empty())
                        out.push_back(closed_set(triangulate_hull(z)));
                }
            }
    }
    return out;
}

/// Refinement of K along {f = g}, and {|f - g| = e0} where needed, cut
/// simplex by simplex; nullopt when its standard part is not a complex.
inline std::optional<VComplex> refine_by_agreement(const VComplex& k, const std::vector<PLMap>& members,
                                                   const std::vector<bool>& need, const FieldElement& e0)
{
    const std::size_t n = k.ambient();
    std::vector<Simplex> pieces;
    for (const auto& ids : k.base.maximal()) {
        std::vector<std::pair<Point, FieldElement>> planes;
        std::size_t pair = 0;
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b, ++pair) {
                auto [pts, h] = differences(k.base, ids, members[a], members[b]);
                // g - f = w . x + c on the simplex
                Matrix rows;
                for (const auto& p : pts) {
                    Point r = p;
                    r.push_back(FieldElement(1));
                    rows.push_back(std::move(r));
                }
                Point wc = *solve(rows, Point(h.begin(), h.end()), n + 1);
                FieldElement c = wc.back();
                wc.pop_back();
                if (is_zero_vector(wc))
                    continue;
                planes.emplace_back(wc, -c);
                if (need[pair]) {
                    planes.emplace_back(wc, e0 - c);
                    planes.emplace_back(wc, -e0 - c);
                }
            }
        Simplex s = k.base.simplex(ids);
        if (planes.empty()) {
            pieces.push_back(std::move(s));
            continue;
        }
        for (const auto& cell : cut_cells({cell_of_simplex(s)}, planes))
            for (auto& t : pulling_triangulation(cell))
                pieces.push_back(std::move(t));
    }
    try {
        return make_vcomplex(Complex::from_simplexes(pieces));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotVComplex)
            throw;
        return std::nullopt;
    }
}

inline PLMap reevaluate(const PLMap& f, const Complex& finer)
{
    std::vector<Point> imgs;
    for (const auto& v : finer.vertices())
        imgs.push_back(f.evaluate(v));
    return PLMap(finer, std::move(imgs), f.codim);
}

inline VComplex triangulate_compatible(const std::vector<Simplex>& y, const std::vector<MarkedSet>& subsets,
                                       TriangulationStats& stats, unsigned seed);

inline VComplex triangulate_step(const std::vector<Simplex>& y, const std::vector<MarkedSet>& subsets,
                                 TriangulationStats& stats, unsigned seed)
{
    const std::size_t d = y[0].ambient();
    std::vector<Simplex> t = low_skeleton(y, subsets, d);
    Point u = v_good_direction(t, d);
    Shear sh = shear_to_vertical(u);
    auto shear_all = [&](const std::vector<Simplex>& ss) {
        std::vector<Simplex> out;
        for (const auto& s : ss)
            out.push_back(sh.apply(s));
        return out;
    };
    std::vector<Simplex> ys = shear_all(y);
    std::vector<Simplex> ts = shear_all(t);

    // X = p(Y) is covered by the shadows of T; cells come from compatibility with each shadow
    std::vector<Simplex> x;
    std::vector<MarkedSet> cells;
    for (const auto& s : ts) {
        x.push_back(project(s));
        cells.push_back(closed_set({x.back()}));
    }
    VComplex k = triangulate_compatible(x, cells, stats, seed);
    std::vector<PLMap> members = sheet_functions(k, ts);

    std::vector<bool> need = pairs_needing_closeness(k, members);
    FieldElement e0 = std::find(need.begin(), need.end(), true) != need.end() ? epsilon0_witness(k, members)
                                                                              : FieldElement::epsilon();
    std::optional<VComplex> refined = refine_by_agreement(k, members, need, e0);
    std::vector<MarkedSet> again = refined ? std::vector<MarkedSet>{} : agreement_sets(k, members, need, e0);
    if (refined) {
        for (auto& f : members)
            f = reevaluate(f, refined->base);
        k = std::move(*refined);
    } else if (!again.empty()) {
        for (const auto& s : k.base.maximal_simplexes())
            again.push_back(closed_set({s}));
        VComplex k2 = triangulate_compatible(k.base.maximal_simplexes(), again, stats, seed);
        for (auto& f : members)
            f = reevaluate(f, k2.base);
        k = std::move(k2);
    }
    stats.members += members.size();

    Multifunction f = validate_multifunction(Multifunction{k.base, members});
    StarResult star = enforce_star_conditions(k, f);
    stats.star_rounds += static_cast<std::size_t>(star.rounds);
    if (!(star.f.member_domain() == star.k.base))
        for (auto& g : star.f.members)
            g = reevaluate(g, star.k.base);
    VTriangulation base{star.k.base.maximal_simplexes(), identity_map(star.k.base), star.k, identity_map(star.k.st)};
    Lift lift = lift_triangulation(base, star.f, seed);
    const Complex& l = lift.result.k.base;
    stats.lifted_simplexes += l.size();

    // the subcomplex over Y, then back through the shear
    std::vector<Box> boxes;
    for (const auto& s : ys)
        boxes.emplace_back(s);
    auto in_y = [&](const Point& c) {
        Box cb(Simplex({c}));
        for (std::size_t i = 0; i < ys.size(); ++i)
            if (boxes[i].meets(cb) && contains(ys[i], c))
                return true;
        return false;
    };
    std::vector<Simplex> keep;
    std::set<VertexSet> covered;
    for (const auto& ids : l.maximal()) {
        Simplex s = l.simplex(ids);
        if (!in_y(s.barycenter()))
            continue;
        keep.push_back(std::move(s));
        for (std::size_t mask = 1; mask < (std::size_t{1} << ids.size()); ++mask) {
            VertexSet face;
            for (std::size_t i = 0; i < ids.size(); ++i)
                if (mask >> i & 1)
                    face.push_back(ids[i]);
            covered.insert(face);
        }
    }
    // lower-dimensional parts of Y lie in faces of dropped simplexes
    for (const auto& ids : l.simplexes())
        if (!covered.count(ids)) {
            Simplex s = l.simplex(ids);
            if (in_y(s.barycenter()))
                keep.push_back(std::move(s));
        }
    std::vector<Simplex> back;
    for (const auto& s : keep)
        back.push_back(sh.unapply(s));
    return make_vcomplex(Complex::from_simplexes(back));
}

inline VComplex triangulate_compatible(const std::vector<Simplex>& y, const std::vector<MarkedSet>& subsets,
                                       TriangulationStats& stats, unsigned seed)
{
    if (y.empty())
        fail(ErrorKind::EmptySet, "nothing to triangulate");
    const std::size_t d = y[0].ambient();
    if (d > dimension_cap())
        fail(ErrorKind::ResourceLimit, "ambient dimension " + std::to_string(d) + " exceeds the cap " +
                                           std::to_string(dimension_cap()));
    ++stats.levels;
    if (d == 1)
        return triangulate_line(y, subsets);
    return triangulate_step(y, subsets, stats, seed);
}

} // namespace detail

/// V-triangulation of the union of the pieces of Y compatible with the subsets.
inline VTriangulation v_triangulate(const std::vector<Simplex>& y, const std::vector<MarkedSet>& subsets,
                                    TriangulationStats* stats = nullptr, unsigned seed = 0)
{
    for (const auto& s : y)
        if (!s.v_bounded())
            fail(ErrorKind::NotFinite, "input simplex " + to_string(s) + " is not V-bounded");
    TriangulationStats local;
    VComplex k = detail::triangulate_compatible(y, subsets, stats ? *stats : local, seed);
    return VTriangulation{y, identity_map(k.base), k, identity_map(k.st)};
}

struct HausdorffLimit {
    /// H in R^n
    std::vector<Simplex> limit;
    /// the section X(eps) in R^n
    std::vector<Simplex> section;
    FieldElement distance;
    int limit_dim = -1;
    int section_dim = -1;
};

namespace detail {

/// Triangulation of a bounded closed polyhedron, dropping coordinate 0.
inline std::vector<Simplex> slice_simplexes(const Polyhedron& p, int& dim)
{
    std::vector<Point> verts = polyhedron_vertices(p);
    std::vector<Simplex> out;
    if (verts.empty())
        return out;
    for (auto& v : verts)
        v.erase(v.begin());
    dim = std::max(dim, affine_dimension(verts));
    return triangulate_hull(verts);
}

/// Drops simplexes lying inside another one of the list.
inline std::vector<Simplex> drop_covered(const std::vector<Simplex>& ss)
{
    std::vector<Simplex> out;
    for (std::size_t i = 0; i < ss.size(); ++i) {
        bool inside = false;
        for (std::size_t j = 0; j < ss.size() && !inside; ++j) {
            if (i == j || (ss[j].vertices == ss[i].vertices && j > i))
                continue;
            inside = std::all_of(ss[i].vertices.begin(), ss[i].vertices.end(),
                                 [&](const Point& v) { return contains(ss[j], v); });
        }
        if (!inside)
            out.push_back(ss[i]);
    }
    return out;
}

} // namespace detail

/// Limit as t -> 0+ of the sections X(t) of a family in R^(1+n) whose
/// coordinate 0 is t. The pieces are convex polyhedra over Q.
inline HausdorffLimit hausdorff_limit(const std::vector<Polyhedron>& family)
{
    if (family.empty())
        fail(ErrorKind::EmptyFamily, "family has no pieces");
    const std::size_t n = family[0].dim;
    if (n < 2)
        fail(ErrorKind::DimensionMismatch, "family needs a parameter and at least one coordinate");
    for (const auto& p : family) {
        require_same_dim(Point(p.dim), Point(n));
        for (const auto& r : p.rows) {
            bool rational = r.offset.is_rational();
            for (const auto& c : r.normal)
                rational = rational && c.is_rational();
            if (!rational)
                fail(ErrorKind::NonRationalFamily, "family row has a coefficient outside Q");
        }
    }
    Point t_axis(n);
    t_axis[0] = FieldElement(1);
    HausdorffLimit out;
    for (const auto& p : family) {
        Polyhedron positive = p;
        positive.add(FieldElement(-1) * t_axis, FieldElement(), true);
        Polyhedron at_zero = closure(positive);
        at_zero.add_equality(t_axis, FieldElement());
        for (auto& s : detail::slice_simplexes(at_zero, out.limit_dim))
            out.limit.push_back(std::move(s));
        Polyhedron at_eps = closure(p);
        at_eps.add_equality(t_axis, FieldElement::epsilon());
        for (auto& s : detail::slice_simplexes(at_eps, out.section_dim))
            out.section.push_back(std::move(s));
    }
    out.limit = detail::drop_covered(out.limit);
    out.section = detail::drop_covered(out.section);
    if (out.limit.empty() || out.section.empty())
        fail(ErrorKind::EmptyFamily, "sections are empty for small t");
    out.distance = hausdorff_distance(out.section, out.limit);
    if (!out.distance.is_infinitesimal())
        fail(ErrorKind::VerificationFailed, "d_H(X(eps), H) = " + out.distance.str() + " is not infinitesimal");
    if (out.limit_dim > out.section_dim)
        fail(ErrorKind::VerificationFailed, "limit has dimension " + std::to_string(out.limit_dim) +
                                                " above the section dimension " + std::to_string(out.section_dim));
    return out;
}

inline HausdorffLimit hausdorff_limit(const std::vector<Simplex>& family)
{
    std::vector<Polyhedron> ps;
    for (const auto& s : family)
        ps.push_back(polyhedron_of_simplex(s));
    return hausdorff_limit(ps);
}

/// A candidate V-triangulation as listed in a document: the simplexes of K
/// (all faces listed), the simplexes of the domain and the vertex map of phi.
struct TriangulationDocument {
    std::vector<Simplex> k;
    std::vector<Simplex> domain;
    std::vector<std::pair<Point, Point>> vertex_map;
};

inline TriangulationDocument document_of(const VTriangulation& t)
{
    TriangulationDocument doc;
    doc.k = t.k.base.all_simplexes();
    doc.domain = t.phi.domain.all_simplexes();
    for (std::size_t i = 0; i < t.phi.images.size(); ++i)
        doc.vertex_map.emplace_back(t.phi.domain.vertex(static_cast<int>(i)), t.phi.images[i]);
    return doc;
}

struct AxiomResult {
    std::string name;
    bool passed = false;
    std::string witness;
};

struct VerificationReport {
    std::vector<AxiomResult> axioms;

    bool ok() const
    {
        return std::all_of(axioms.begin(), axioms.end(), [](const AxiomResult& a) { return a.passed; });
    }

    const AxiomResult* find(const std::string& name) const
    {
        for (const auto& a : axioms)
            if (a.name == name)
                return &a;
        return nullptr;
    }
};

inline std::size_t& verifier_samples()
{
    static std::size_t n = 2;
    return n;
}

namespace detail {

/// Barycenter and seeded random points of the relative interior.
inline std::vector<Point> interior_samples(const Simplex& s, std::mt19937& rng)
{
    std::vector<Point> out{s.barycenter()};
    if (s.dim() > 0)
        for (std::size_t i = 0; i < verifier_samples(); ++i)
            out.push_back(affine_combination(s.vertices, random_weights(rng, s.vertices.size())));
    return out;
}

/// A simplex of c whose open part meets the set and its complement, checked
/// at samples pulled back through back.
inline std::optional<std::string> compatibility_failure(const Complex& c, const PLMap& back,
                                                        const std::function<bool(const Point&)>& member,
                                                        std::mt19937& rng)
{
    for (const auto& s : c.all_simplexes()) {
        std::optional<bool> side;
        for (const auto& x : interior_samples(s, rng)) {
            bool in = member(back.evaluate(x));
            if (side && *side != in)
                return to_string(s);
            side = in;
        }
    }
    return std::nullopt;
}

} // namespace detail

namespace detail {

struct PointListLess {
    bool operator()(const std::vector<Point>& a, const std::vector<Point>& b) const
    {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), PointLess{});
    }
};

} // namespace detail

/// Independent checks of a candidate V-triangulation of Y compatible with the subsets.
inline VerificationReport verify_v_triangulation(const std::vector<Simplex>& y, const std::vector<MarkedSet>& subsets,
                                                 const TriangulationDocument& doc, unsigned seed = 0)
{
    VerificationReport report;
    auto check = [&](const std::string& name, const std::function<std::optional<std::string>()>& body) {
        AxiomResult r{name, false, ""};
        try {
            auto w = body();
            r.passed = !w;
            if (w)
                r.witness = *w;
        } catch (const std::exception& e) {
            r.witness = e.what();
        }
        report.axioms.push_back(std::move(r));
        return report.axioms.back().passed;
    };
    std::mt19937 rng(seed);
    Complex k, d;
    bool k_proper = false;
    std::optional<VComplex> vk;
    std::optional<PLMap> phi, inv, st_map;

    check("K face-closed", [&]() -> std::optional<std::string> {
        if (auto f = missing_face(doc.k))
            return "missing face " + to_string(*f);
        return std::nullopt;
    });
    check("K simplexes meet in faces", [&]() -> std::optional<std::string> {
        k = Complex::from_simplexes(doc.k);
        if (auto v = find_intersection_violation(k))
            return std::string(v->what());
        k_proper = true;
        return std::nullopt;
    });
    check("K V-bounded", [&]() -> std::optional<std::string> {
        for (const auto& v : k.vertices())
            if (!is_v_bounded(v))
                return "vertex " + to_string(v);
        return std::nullopt;
    });
    check("st K is a complex", [&]() -> std::optional<std::string> {
        vk = make_vcomplex(k);
        return std::nullopt;
    });
    check("domain triangulates Y", [&]() -> std::optional<std::string> {
        d = Complex::from_simplexes(doc.domain);
        if (!(k_proper && d == k))
            if (auto v = find_intersection_violation(d))
                return std::string(v->what());
        bool y_tiles = !find_intersection_violation(Complex::from_simplexes(y));
        if (auto w = tiling_difference_witness(d.maximal_simplexes(), y, y_tiles))
            return "domain and Y differ at " + to_string(*w);
        return std::nullopt;
    });
    check("phi is a vertex map into K", [&]() -> std::optional<std::string> {
        std::map<Point, Point, PointLess> table(doc.vertex_map.begin(), doc.vertex_map.end());
        std::vector<Point> imgs;
        for (const auto& v : d.vertices()) {
            auto it = table.find(v);
            if (it == table.end())
                return "no image for " + to_string(v);
            if (!k.vertex_id(it->second))
                return "image " + to_string(it->second) + " is not a vertex of K";
            imgs.push_back(it->second);
        }
        phi = PLMap(d, std::move(imgs), k.ambient());
        return std::nullopt;
    });
    check("phi is a bijection onto |K|", [&]() -> std::optional<std::string> {
        inv = invert(*phi, k_proper ? &k : nullptr);
        if (!(inv->domain == k)) {
            auto key = [](const Simplex& x) {
                std::vector<Point> v = x.vertices;
                std::sort(v.begin(), v.end(), PointLess{});
                return v;
            };
            std::set<std::vector<Point>, detail::PointListLess> in_k, in_image;
            for (const auto& x : k.all_simplexes())
                in_k.insert(key(x));
            for (const auto& x : inv->domain.all_simplexes())
                in_image.insert(key(x));
            for (const auto& x : in_image)
                if (!in_k.count(x))
                    return "image simplex " + to_string(Simplex::make(x)) + " is not in K";
            for (const auto& x : in_k)
                if (!in_image.count(x))
                    return "simplex " + to_string(Simplex::make(x)) + " of K is not an image";
            return std::string("image simplexes differ from K");
        }
        const auto& tops = d.maximal();
        for (std::size_t i = 0; i < 20 && !tops.empty(); ++i) {
            Simplex s = d.simplex(tops[rng() % tops.size()]);
            Point x = affine_combination(s.vertices, detail::random_weights(rng, s.vertices.size()));
            if (inv->evaluate(phi->evaluate(x)) != x)
                return "round trip fails at " + to_string(x);
        }
        return std::nullopt;
    });
    check("phi induces a map on standard parts", [&]() -> std::optional<std::string> {
        bool dom_v = is_vcomplex(d);
        if (auto w = inducement_failure(*phi, dom_v))
            return "st agrees at " + to_string(w->first) + " and " + to_string(w->second) + ", images differ";
        return std::nullopt;
    });
    check("phi inverse induces a map on standard parts", [&]() -> std::optional<std::string> {
        if (auto w = inducement_failure(*inv, true))
            return "st agrees at " + to_string(w->first) + " and " + to_string(w->second) + ", images differ";
        st_map = induced_map(*inv, *vk);
        return std::nullopt;
    });
    std::vector<Simplex> st_y = st_of_simplex_union(y);
    check("(phi_st, st K) triangulates st Y", [&]() -> std::optional<std::string> {
        invert(*st_map);
        std::vector<Simplex> imgs;
        for (const auto& ids : st_map->domain.maximal()) {
            std::vector<Point> pts;
            for (int v : ids)
                pts.push_back(st_map->image(v));
            imgs.emplace_back(std::move(pts));
        }
        if (auto w = tiling_difference_witness(imgs, st_y))
            return "image of st K and st Y differ at " + to_string(*w);
        return std::nullopt;
    });
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        const MarkedSet& m = subsets[i];
        const std::string label = m.name.empty() ? "subset " + std::to_string(i + 1) : m.name;
        check("compatible with " + label, [&]() -> std::optional<std::string> {
            if (auto w = detail::compatibility_failure(k, *inv, [&](const Point& x) { return m.contains(x); }, rng))
                return "open simplex " + *w + " meets the subset and its complement";
            return std::nullopt;
        });
        std::vector<Simplex> st_m = st_of_simplex_union(m.closure());
        check("st compatible with " + label, [&]() -> std::optional<std::string> {
            if (auto w = detail::compatibility_failure(st_map->domain, *st_map,
                                                       [&](const Point& x) { return in_union(st_m, x); }, rng))
                return "open simplex " + *w + " of st K meets st of the subset and its complement";
            return std::nullopt;
        });
    }
    return report;
}

inline VerificationReport verify_v_triangulation(const std::vector<Simplex>& y, const std::vector<MarkedSet>& subsets,
                                                 const VTriangulation& t, unsigned seed = 0)
{
    return verify_v_triangulation(y, subsets, document_of(t), seed);
}

} // namespace vtri
