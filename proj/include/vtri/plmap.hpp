#pragma once

#include "simplicial.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace vtri {

/// Simplexwise affine map given by the images of the domain vertices.
struct PLMap {
    Complex domain;
    /// images[id] is the image of domain vertex id.
    std::vector<Point> images;
    std::size_t codim = 0;

    PLMap() = default;
    PLMap(Complex d, std::vector<Point> imgs, std::size_t cd) : domain(std::move(d)), images(std::move(imgs)), codim(cd)
    {
        if (images.size() != domain.vertices().size())
            fail(ErrorKind::DimensionMismatch, "one image per domain vertex is required");
        for (const auto& p : images)
            if (p.size() != codim)
                fail(ErrorKind::DimensionMismatch, "image of dimension " + std::to_string(p.size()) +
                                                       " in a map to dimension " + std::to_string(codim));
    }

    const Point& image(int id) const { return images.at(static_cast<std::size_t>(id)); }

    /// Image of a point given by a domain simplex and affine weights.
    Point combine(const VertexSet& s, const std::vector<FieldElement>& w) const
    {
        Point y(codim);
        for (std::size_t i = 0; i < s.size(); ++i)
            if (!w[i].is_zero())
                y = y + w[i] * image(s[i]);
        return y;
    }

    Point evaluate(const Point& x) const
    {
        if (auto id = domain.vertex_id(x))
            return image(*id);
        for (const auto& m : domain.maximal()) {
            if (!domain.box_holds(m, x))
                continue;
            auto w = affine_coordinates(domain.simplex(m), x);
            if (!w)
                continue;
            bool inside = true;
            for (const auto& t : *w)
                inside = inside && t.sign() >= 0;
            if (inside)
                return combine(m, *w);
        }
        fail(ErrorKind::OutsideDomain, "point " + to_string(x) + " is outside the domain");
    }

    /// Maximal simplexes of the graph in R^(n + codim).
    std::vector<Simplex> graph() const
    {
        std::vector<Simplex> out;
        for (const auto& m : domain.maximal()) {
            std::vector<Point> pts;
            for (int v : m) {
                Point p = domain.vertex(v);
                for (const auto& y : image(v))
                    p.push_back(y);
                pts.push_back(std::move(p));
            }
            out.emplace_back(std::move(pts));
        }
        return out;
    }

    bool v_bounded() const
    {
        for (const auto& p : images)
            if (!is_v_bounded(p))
                return false;
        return true;
    }
};

inline PLMap plmap_from_function(const Complex& k, std::size_t codim, const std::function<Point(const Point&)>& f)
{
    std::vector<Point> imgs;
    for (const auto& v : k.vertices())
        imgs.push_back(f(v));
    return PLMap(k, std::move(imgs), codim);
}

inline PLMap identity_map(const Complex& k)
{
    return PLMap(k, k.vertices(), k.ambient());
}

inline Point evaluate(const PLMap& f, const Point& x) { return f.evaluate(x); }

/// g o f, where f maps each domain simplex into a single simplex of g's domain.
inline PLMap compose(const PLMap& g, const PLMap& f)
{
    if (f.codim != g.domain.ambient())
        fail(ErrorKind::DimensionMismatch, "codomain of f is not the ambient space of g's domain");
    for (const auto& m : f.domain.maximal()) {
        std::vector<Point> imgs;
        for (int v : m)
            imgs.push_back(f.image(v));
        Point c = Simplex(imgs).barycenter();
        auto carrier = g.domain.carrier(c);
        if (!carrier)
            fail(ErrorKind::OutsideDomain, "image " + to_string(c) + " leaves the domain of g");
        bool ok = false;
        for (const auto& gm : g.domain.maximal()) {
            Simplex gs = g.domain.simplex(gm);
            bool all = true;
            for (const auto& p : imgs)
                all = all && contains(gs, p);
            if (all) {
                ok = true;
                break;
            }
        }
        if (!ok)
            fail(ErrorKind::PreconditionViolation, "f maps a simplex across several simplexes of g's domain");
    }
    std::vector<Point> imgs;
    for (const auto& p : f.images)
        imgs.push_back(g.evaluate(p));
    return PLMap(f.domain, std::move(imgs), g.codim);
}

/// Restriction to a subcomplex of the domain.
inline PLMap restrict(const PLMap& f, const Complex& sub)
{
    std::vector<Point> imgs;
    for (const auto& s : sub.simplexes()) {
        VertexSet ids;
        for (int v : s) {
            auto id = f.domain.vertex_id(sub.vertex(v));
            if (!id)
                fail(ErrorKind::PreconditionViolation, "restriction to a set outside the domain");
            ids.push_back(*id);
        }
        std::sort(ids.begin(), ids.end());
        if (!f.domain.contains_set(ids))
            fail(ErrorKind::PreconditionViolation, "restriction target is not a subcomplex");
    }
    for (const auto& v : sub.vertices())
        imgs.push_back(f.image(*f.domain.vertex_id(v)));
    return PLMap(sub, std::move(imgs), f.codim);
}

class NotInvertible : public Error {
public:
    NotInvertible(Point a, Point b, Point image)
        : Error(ErrorKind::NotInvertible,
                to_string(a) + " and " + to_string(b) + " both map to " + to_string(image)),
          first(std::move(a)), second(std::move(b)), value(std::move(image))
    {
    }

    Point first, second, value;
};

/// Inverse of a simplexwise affine bijection onto a complex. When target is a validated complex
/// holding every image simplex, the image is not checked for intersections.
inline PLMap invert(const PLMap& f, const Complex* target = nullptr)
{
    std::map<Point, int, PointLess> seen;
    for (std::size_t i = 0; i < f.images.size(); ++i) {
        auto [it, fresh] = seen.emplace(f.images[i], static_cast<int>(i));
        if (!fresh)
            throw NotInvertible(f.domain.vertex(it->second), f.domain.vertices()[i], f.images[i]);
    }
    std::vector<Simplex> image_simplexes;
    for (const auto& m : f.domain.maximal()) {
        std::vector<Point> imgs;
        for (int v : m)
            imgs.push_back(f.image(v));
        if (!affinely_independent(imgs)) {
            // a kernel direction of the vertex images gives two points with one image
            Matrix rows;
            for (std::size_t c = 0; c < f.codim; ++c) {
                std::vector<FieldElement> row;
                for (const auto& p : imgs)
                    row.push_back(p[c]);
                rows.push_back(row);
            }
            rows.push_back(std::vector<FieldElement>(imgs.size(), FieldElement(1)));
            Point k = nullspace(rows, imgs.size()).at(0);
            FieldElement scale;
            for (const auto& x : k)
                scale = max(scale, abs(x));
            std::vector<FieldElement> w1(imgs.size()), w2(imgs.size());
            for (std::size_t i = 0; i < imgs.size(); ++i) {
                FieldElement base(Rational(1, static_cast<long>(imgs.size())));
                FieldElement d = k[i] / (scale * FieldElement(static_cast<long>(2 * imgs.size())));
                w1[i] = base + d;
                w2[i] = base - d;
            }
            Simplex s = f.domain.simplex(m);
            throw NotInvertible(affine_combination(s.vertices, w1), affine_combination(s.vertices, w2),
                                f.combine(m, w1));
        }
        image_simplexes.emplace_back(std::move(imgs));
    }
    auto in_target = [&] {
        if (!target)
            return false;
        for (const auto& t : image_simplexes) {
            VertexSet ids;
            for (const auto& p : t.vertices) {
                auto id = target->vertex_id(p);
                if (!id)
                    return false;
                ids.push_back(*id);
            }
            std::sort(ids.begin(), ids.end());
            if (!target->contains_set(ids))
                return false;
        }
        return true;
    };
    Complex image;
    try {
        // simplexes of a complex already meet properly
        image = in_target() ? Complex::from_simplexes(image_simplexes) : validate_complex(image_simplexes);
    } catch (const IntersectionViolation& v) {
        // preimages of the witness in the two image simplexes
        auto pre = [&](const Simplex& t) {
            for (const auto& m : f.domain.maximal()) {
                std::vector<Point> imgs;
                for (int x : m)
                    imgs.push_back(f.image(x));
                std::vector<Point> sorted = imgs, tv = t.vertices;
                std::sort(sorted.begin(), sorted.end(), PointLess{});
                std::sort(tv.begin(), tv.end(), PointLess{});
                if (sorted != tv)
                    continue;
                auto w = affine_coordinates(Simplex(imgs), v.point);
                return affine_combination(f.domain.simplex(m).vertices, *w);
            }
            return Point{};
        };
        throw NotInvertible(pre(v.first), pre(v.second), v.point);
    }
    std::vector<Point> back(image.vertices().size());
    for (std::size_t i = 0; i < f.images.size(); ++i)
        back[static_cast<std::size_t>(*image.vertex_id(f.images[i]))] = f.domain.vertices()[i];
    return PLMap(image, std::move(back), f.domain.ambient());
}

class NotInduced : public Error {
public:
    NotInduced(Point a, Point b, const std::string& detail)
        : Error(ErrorKind::NotInduced, to_string(a) + " and " + to_string(b) +
                                           " have equal standard parts but images with different standard parts" +
                                           detail),
          first(std::move(a)), second(std::move(b))
    {
    }

    Point first, second;
};

struct InducementWitness {
    Point first, second;
};

/// Decides whether f induces a map on standard parts, returning a witness
/// pair when it does not. Vertices with equal standard parts must have images
/// with equal standard parts; unless the domain is known to be a V-complex,
/// an LP per pair of maximal simplexes also searches for points x, y with
/// st x = st y and st f(x) != st f(y).
inline std::optional<InducementWitness> inducement_failure(const PLMap& f, bool domain_is_vcomplex = false)
{
    const Complex& k = f.domain;
    for (const auto& v : k.vertices())
        if (!is_v_bounded(v))
            fail(ErrorKind::NotFinite, "domain vertex " + to_string(v) + " is not V-bounded");
    if (!f.v_bounded())
        fail(ErrorKind::NotFinite, "map is not V-bounded");
    std::vector<Point> st_dom, st_img;
    std::map<Point, int, PointLess> first;
    for (std::size_t i = 0; i < k.vertices().size(); ++i) {
        st_dom.push_back(standard_part(k.vertices()[i]));
        st_img.push_back(standard_part(f.images[i]));
        auto [it, fresh] = first.emplace(st_dom.back(), static_cast<int>(i));
        if (!fresh && st_img[static_cast<std::size_t>(it->second)] != st_img.back())
            return InducementWitness{k.vertex(it->second), k.vertices()[i]};
    }
    if (domain_is_vcomplex)
        return std::nullopt;
    std::vector<Simplex> st_simplexes;
    for (const auto& m : k.maximal()) {
        std::vector<Point> pts;
        for (int v : m)
            pts.push_back(st_dom[static_cast<std::size_t>(v)]);
        st_simplexes.emplace_back(std::move(pts));
    }
    std::vector<Box> boxes;
    for (const auto& s : st_simplexes)
        boxes.emplace_back(s);
    const std::size_t n = k.ambient();
    for (std::size_t p = 0; p < k.maximal().size(); ++p) {
        for (std::size_t q = p; q < k.maximal().size(); ++q) {
            if (!boxes[p].meets(boxes[q]))
                continue;
            const VertexSet& a = k.maximal()[p];
            const VertexSet& b = k.maximal()[q];
            // vertices that already agree as points contribute nothing new when p == q
            for (std::size_t c = 0; c < f.codim; ++c) {
                LinearProgram lp(a.size() + b.size());
                for (std::size_t j = 0; j < lp.num_vars; ++j)
                    lp.nonnegative[j] = true;
                std::vector<FieldElement> sa(lp.num_vars), sb(lp.num_vars);
                for (std::size_t i = 0; i < a.size(); ++i)
                    sa[i] = 1;
                for (std::size_t j = 0; j < b.size(); ++j)
                    sb[a.size() + j] = 1;
                lp.add(sa, Relation::Equal, FieldElement(1));
                lp.add(sb, Relation::Equal, FieldElement(1));
                for (std::size_t d = 0; d < n; ++d) {
                    std::vector<FieldElement> row(lp.num_vars);
                    for (std::size_t i = 0; i < a.size(); ++i)
                        row[i] = st_dom[static_cast<std::size_t>(a[i])][d];
                    for (std::size_t j = 0; j < b.size(); ++j)
                        row[a.size() + j] = -st_dom[static_cast<std::size_t>(b[j])][d];
                    lp.add(row, Relation::Equal, FieldElement(0));
                }
                for (std::size_t i = 0; i < a.size(); ++i)
                    lp.objective[i] = st_img[static_cast<std::size_t>(a[i])][c];
                for (std::size_t j = 0; j < b.size(); ++j)
                    lp.objective[a.size() + j] = -st_img[static_cast<std::size_t>(b[j])][c];
                LPOutcome res = solve_lp(lp);
                if (!res.optimal() || res.value.sign() <= 0)
                    continue;
                std::vector<FieldElement> wa(res.point.begin(), res.point.begin() + static_cast<std::ptrdiff_t>(a.size()));
                std::vector<FieldElement> wb(res.point.begin() + static_cast<std::ptrdiff_t>(a.size()), res.point.end());
                return InducementWitness{affine_combination(k.simplex(a).vertices, wa),
                                         affine_combination(k.simplex(b).vertices, wb)};
            }
        }
    }
    return std::nullopt;
}

inline bool induces(const PLMap& f, bool domain_is_vcomplex = false)
{
    return !inducement_failure(f, domain_is_vcomplex);
}

/// The map g on st(domain) with st(f(x)) = g(st(x)); the domain must be a V-complex.
inline PLMap induced_map(const PLMap& f, const VComplex& vk)
{
    if (!(vk.base == f.domain))
        fail(ErrorKind::PreconditionViolation, "V-complex does not match the domain");
    if (auto w = inducement_failure(f, true))
        throw NotInduced(w->first, w->second, "");
    std::vector<Point> imgs(vk.st.vertices().size());
    for (std::size_t i = 0; i < f.images.size(); ++i)
        imgs[static_cast<std::size_t>(vk.st_vertex[i])] = standard_part(f.images[i]);
    return PLMap(vk.st, std::move(imgs), f.codim);
}

inline PLMap induced_map(const PLMap& f) { return induced_map(f, make_vcomplex(f.domain)); }

/// Simplexwise affine map sending vertex i of K to vertex pi[i] of K2, for a
/// bijection from type_equal; checked to be a V-homeomorphism.
inline PLMap canonical_v_homeomorphism(const VComplex& k, const VComplex& k2, const std::vector<int>& pi)
{
    const auto& verts = k.base.vertices();
    if (pi.size() != verts.size() || k2.base.vertices().size() != verts.size())
        fail(ErrorKind::PreconditionViolation, "vertex bijection has the wrong size");
    std::vector<Point> imgs;
    for (std::size_t i = 0; i < verts.size(); ++i)
        imgs.push_back(k2.base.vertex(pi[i]));
    for (const auto& s : k.base.simplexes()) {
        VertexSet img;
        for (int v : s)
            img.push_back(pi[static_cast<std::size_t>(v)]);
        std::sort(img.begin(), img.end());
        if (!k2.base.contains_set(img))
            fail(ErrorKind::PreconditionViolation, "vertex map does not carry simplexes to simplexes");
    }
    for (std::size_t a = 0; a < verts.size(); ++a)
        for (std::size_t b = a + 1; b < verts.size(); ++b)
            if ((k.st_vertex[a] == k.st_vertex[b]) !=
                (k2.st_vertex[static_cast<std::size_t>(pi[a])] == k2.st_vertex[static_cast<std::size_t>(pi[b])]))
                fail(ErrorKind::PreconditionViolation, "vertex map does not respect equality of standard parts");
    PLMap phi(k.base, std::move(imgs), k2.base.ambient());
    induced_map(phi, k);
    induced_map(invert(phi), k2);
    return phi;
}

/// Members are maps into R^1 on a common complex refining the base.
struct Multifunction {
    Complex base;
    std::vector<PLMap> members;

    const Complex& member_domain() const { return members.at(0).domain; }
};

class TrichotomyViolation : public Error {
public:
    TrichotomyViolation(Simplex p, std::size_t f, std::size_t g, const std::string& pattern)
        : Error(ErrorKind::TrichotomyViolation, "members " + std::to_string(f) + " and " + std::to_string(g) +
                                                    " on " + to_string(p) + " have difference signs " + pattern),
          simplex(std::move(p)), first(f), second(g)
    {
    }

    Simplex simplex;
    std::size_t first, second;
};

namespace detail {

/// For a base simplex P, the member-domain simplexes whose open simplex lies in P°.
inline std::vector<VertexSet> interior_pieces(const Complex& base, const VertexSet& p, const Complex& d)
{
    Simplex ps = base.simplex(p);
    std::vector<std::optional<std::vector<bool>>> support(d.vertices().size());
    for (std::size_t v = 0; v < d.vertices().size(); ++v) {
        auto w = affine_coordinates(ps, d.vertices()[v]);
        if (!w)
            continue;
        std::vector<bool> sup(p.size());
        bool inside = true;
        for (std::size_t i = 0; i < p.size(); ++i) {
            inside = inside && (*w)[i].sign() >= 0;
            sup[i] = (*w)[i].sign() > 0;
        }
        if (inside)
            support[v] = sup;
    }
    std::vector<VertexSet> out;
    for (const auto& s : d.simplexes()) {
        std::vector<bool> all(p.size(), false);
        bool inside = true;
        for (int v : s) {
            const auto& sup = support[static_cast<std::size_t>(v)];
            if (!sup) {
                inside = false;
                break;
            }
            for (std::size_t i = 0; i < p.size(); ++i)
                all[i] = all[i] || (*sup)[i];
        }
        if (inside && std::all_of(all.begin(), all.end(), [](bool b) { return b; }))
            out.push_back(s);
    }
    return out;
}

/// -1, 0, +1 when g - f is negative, zero or positive on all of P°; 2 otherwise.
inline int trichotomy_sign(const Multifunction& m, const std::vector<VertexSet>& pieces, std::size_t f, std::size_t g,
                           std::string* pattern = nullptr)
{
    bool all_zero = true, pos_ok = true, neg_ok = true;
    std::string pat;
    for (const auto& s : pieces) {
        bool has_pos = false, has_neg = false;
        for (int v : s) {
            int sg = compare(m.members[g].image(v)[0], m.members[f].image(v)[0]);
            pat += sg > 0 ? '+' : sg < 0 ? '-' : '0';
            has_pos = has_pos || sg > 0;
            has_neg = has_neg || sg < 0;
        }
        pat += ' ';
        all_zero = all_zero && !has_pos && !has_neg;
        pos_ok = pos_ok && has_pos && !has_neg;
        neg_ok = neg_ok && has_neg && !has_pos;
    }
    if (pattern)
        *pattern = pat;
    if (all_zero)
        return 0;
    if (pos_ok)
        return 1;
    if (neg_ok)
        return -1;
    return 2;
}

} // namespace detail

/// Checks shapes, refinement of the base, and trichotomy on every open base simplex.
inline Multifunction validate_multifunction(Multifunction m)
{
    if (m.members.empty())
        return m;
    const Complex& d = m.member_domain();
    for (const auto& f : m.members) {
        if (!(f.domain == d))
            fail(ErrorKind::PreconditionViolation, "members must share one domain complex");
        if (f.codim != 1)
            fail(ErrorKind::DimensionMismatch, "members must be real-valued");
    }
    const bool same = d == m.base;
    std::vector<Simplex> base_max = m.base.maximal_simplexes();
    for (const auto& s : same ? std::vector<Simplex>{} : d.maximal_simplexes()) {
        bool inside = false;
        for (const auto& b : base_max) {
            bool all = true;
            for (const auto& v : s.vertices)
                all = all && contains(b, v);
            if (all) {
                inside = true;
                break;
            }
        }
        if (!inside)
            fail(ErrorKind::PreconditionViolation, "member domain does not refine the base at " + to_string(s));
    }
    if (!same && !same_union(d.maximal_simplexes(), base_max))
        fail(ErrorKind::PreconditionViolation, "member domain and base cover different sets");
    for (const auto& p : m.base.simplexes()) {
        auto pieces = same ? std::vector<VertexSet>{p} : detail::interior_pieces(m.base, p, d);
        for (std::size_t f = 0; f < m.members.size(); ++f)
            for (std::size_t g = f + 1; g < m.members.size(); ++g) {
                std::string pat;
                if (detail::trichotomy_sign(m, pieces, f, g, &pat) == 2)
                    throw TrichotomyViolation(m.base.simplex(p), f, g, pat);
            }
    }
    return m;
}

inline Point interior_point_of(const Simplex& s)
{
    try {
        return choose_interior_point(s);
    } catch (const Error&) {
        return s.barycenter();
    }
}

/// Indices of the members sorted by value on P°, grouped into classes of equal functions on P.
inline std::vector<std::vector<std::size_t>> ordered_classes(const Multifunction& m, const VertexSet& p)
{
    Point x = interior_point_of(m.base.simplex(p));
    std::vector<std::pair<FieldElement, std::size_t>> vals;
    for (std::size_t i = 0; i < m.members.size(); ++i)
        vals.emplace_back(m.members[i].evaluate(x)[0], i);
    std::stable_sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i == 0 || vals[i].first != vals[i - 1].first)
            out.emplace_back();
        out.back().push_back(vals[i].second);
    }
    return out;
}

/// Least-index member g with f < g on P° and no member strictly between.
inline std::optional<std::size_t> successor(const Multifunction& m, const VertexSet& p, std::size_t f)
{
    auto classes = ordered_classes(m, p);
    for (std::size_t c = 0; c + 1 < classes.size(); ++c)
        if (std::find(classes[c].begin(), classes[c].end(), f) != classes[c].end())
            return *std::min_element(classes[c + 1].begin(), classes[c + 1].end());
    return std::nullopt;
}

struct RegionComplexes {
    std::vector<Simplex> graphs;
    std::vector<Simplex> bands;

    std::vector<Simplex> region() const
    {
        std::vector<Simplex> all = graphs;
        all.insert(all.end(), bands.begin(), bands.end());
        return all;
    }
};

/// Graphs of the members over each base simplex and the bands between successive members.
inline RegionComplexes region_complexes(const Multifunction& m)
{
    RegionComplexes out;
    const Complex& d = m.member_domain();
    for (const auto& p : m.base.maximal()) {
        auto classes = ordered_classes(m, p);
        for (const auto& piece : detail::interior_pieces(m.base, p, d)) {
            if (piece.size() != p.size())
                continue;
            std::vector<Point> verts;
            for (int v : piece)
                verts.push_back(d.vertex(v));
            auto heights = [&](std::size_t f) {
                std::vector<FieldElement> h;
                for (int v : piece)
                    h.push_back(m.members[f].image(v)[0]);
                return h;
            };
            for (std::size_t c = 0; c < classes.size(); ++c) {
                auto h = heights(classes[c][0]);
                auto g = prism_simplexes(verts, h, h);
                out.graphs.insert(out.graphs.end(), g.begin(), g.end());
                if (c + 1 < classes.size()) {
                    auto b = prism_simplexes(verts, h, heights(classes[c + 1][0]));
                    out.bands.insert(out.bands.end(), b.begin(), b.end());
                }
            }
        }
    }
    return out;
}

/// Direction u admissible for S: in the direction space of S and parallel to
/// no facet. When the standard parts of the vertices are affinely dependent
/// the direction is infinitesimal and moves the last vertex of a simplicial
/// vertex onto the affine hull of the others.
inline Point admissible_direction(const Simplex& s)
{
    const std::size_t k = s.vertices.size() - 1;
    if (k == 0)
        return Point(s.ambient());
    std::vector<Point> sv = distinct_st_vertices(s);
    if (sv.size() == k + 1 && affinely_independent(sv)) {
        std::vector<Point> others(s.vertices.begin(), s.vertices.end() - 1);
        return s.vertices.back() - Simplex(others).barycenter();
    }
    // rational weights mu with sum 1 expressing st(a_i) through the other standard parts
    std::optional<Point> mu;
    std::size_t apex = 0;
    std::vector<Point> others;
    for (; apex <= k && !mu; ++apex) {
        others.clear();
        for (std::size_t j = 0; j <= k; ++j)
            if (j != apex)
                others.push_back(s.vertices[j]);
        Matrix rows;
        Point rhs;
        Point target = standard_part(s.vertices[apex]);
        for (std::size_t c = 0; c < s.ambient(); ++c) {
            std::vector<FieldElement> row;
            for (const auto& o : others)
                row.push_back(standard_part(o)[c]);
            rows.push_back(row);
            rhs.push_back(target[c]);
        }
        rows.push_back(std::vector<FieldElement>(k, FieldElement(1)));
        rhs.push_back(FieldElement(1));
        mu = solve(rows, rhs, k);
    }
    if (!mu)
        fail(ErrorKind::BadDirection, "standard parts of the vertices are affinely independent");
    --apex;
    // an infinitesimal correction keeps every weight nonzero
    const FieldElement e = FieldElement::epsilon();
    std::size_t anchor = k;
    long zeros = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if ((*mu)[i].is_zero())
            ++zeros;
        else if (anchor == k)
            anchor = i;
    }
    for (std::size_t i = 0; i < k; ++i)
        if ((*mu)[i].is_zero())
            (*mu)[i] = e;
    (*mu)[anchor] -= FieldElement(zeros) * e;
    return affine_combination(others, *mu) - s.vertices[apex];
}

/// Checks u against the facets of S, and st(u) = 0 for st-degenerate S.
inline void check_direction(const Simplex& s, const Point& u)
{
    const std::size_t k = s.vertices.size() - 1;
    std::vector<Point> dirs = difference_vectors(s.vertices);
    if (is_zero_vector(u) || !in_linear_span(dirs, u))
        fail(ErrorKind::BadDirection, "direction " + to_string(u) + " does not lie in the direction space of S");
    for (std::size_t i = 0; i <= k; ++i) {
        std::vector<Point> facet;
        for (std::size_t j = 0; j <= k; ++j)
            if (j != i)
                facet.push_back(s.vertices[j]);
        if (in_linear_span(difference_vectors(facet), u))
            fail(ErrorKind::BadDirection, "direction " + to_string(u) + " is parallel to facet " + std::to_string(i));
    }
    std::vector<Point> sv = distinct_st_vertices(s);
    if (sv.size() != k + 1 || !affinely_independent(sv)) {
        if (!is_v_bounded(u) || !is_zero_vector(standard_part(u)))
            fail(ErrorKind::BadDirection, "degenerate simplex needs an infinitesimal direction");
    }
}

/// Other end of the chord through x in direction u.
inline Point chord_endpoint(const Simplex& s, const Point& u, const Point& x)
{
    auto t0 = affine_coordinates(s, x);
    Point zero(s.ambient());
    Simplex shifted = s;
    auto du = affine_coordinates(s, s.vertices[0] + u);
    if (!t0 || !du)
        fail(ErrorKind::OutsideDomain, "point or direction outside the affine hull");
    // barycentric coordinates along x + t u are t0 + t (du - e_0)
    std::vector<FieldElement> slope(du->size());
    for (std::size_t i = 0; i < slope.size(); ++i)
        slope[i] = (*du)[i] - (i == 0 ? FieldElement(1) : FieldElement(0));
    auto extent = [&](int sign) {
        std::optional<FieldElement> best;
        for (std::size_t i = 0; i < slope.size(); ++i) {
            FieldElement sl = sign > 0 ? slope[i] : -slope[i];
            if (sl.sign() >= 0)
                continue;
            FieldElement t = (*t0)[i] / -sl;
            if (!best || t < *best)
                best = t;
        }
        return best.value_or(FieldElement());
    };
    FieldElement fwd = extent(1), back = extent(-1);
    if (!fwd.is_zero())
        return x + fwd * u;
    return x + (-back) * u;
}

/// Extension of f from the boundary of S along chords parallel to u.
/// f is given on a subdivision of the boundary of S.
inline PLMap extend_from_boundary(const Simplex& s, const PLMap& f, const Point& u)
{
    const std::size_t k = s.vertices.size() - 1;
    if (k == 0)
        return PLMap(Complex::from_simplexes({s}), {Point(f.codim)}, f.codim);
    check_direction(s, u);
    if (!f.v_bounded())
        fail(ErrorKind::NotFinite, "boundary map is not V-bounded");
    std::vector<Simplex> facets;
    for (std::size_t i = 0; i <= k; ++i) {
        std::vector<Point> fv;
        for (std::size_t j = 0; j <= k; ++j)
            if (j != i)
                fv.push_back(s.vertices[j]);
        facets.emplace_back(fv);
    }
    if (auto w = union_difference_witness(f.domain.maximal_simplexes(), facets))
        fail(ErrorKind::PreconditionViolation, "boundary map domain differs from the boundary at " + to_string(*w));

    std::vector<Point> corner;
    for (const auto& v : s.vertices)
        corner.push_back(f.evaluate(v));
    auto affine_value = [&](const Point& x) { return affine_combination(corner, *affine_coordinates(s, x)); };
    bool affine = true;
    for (std::size_t i = 0; i < f.images.size() && affine; ++i)
        affine = affine_value(f.domain.vertices()[i]) == f.images[i];
    if (affine) {
        Complex dom = Complex::from_simplexes({s});
        std::vector<Point> imgs;
        for (const auto& v : dom.vertices())
            imgs.push_back(f.evaluate(v));
        return PLMap(std::move(dom), std::move(imgs), f.codim);
    }

    // chart y -> a_0 + sum y_i (a_i - a_0); u has chart direction w
    const Point& a0 = s.vertices[0];
    std::vector<FieldElement> w;
    {
        auto du = affine_coordinates(s, a0 + u);
        w.assign(du->begin() + 1, du->end());
    }
    std::size_t j = 0;
    while (w[j].is_zero())
        ++j;
    auto to_chart = [&](const Point& x) {
        auto t = affine_coordinates(s, x);
        return std::vector<FieldElement>(t->begin() + 1, t->end());
    };
    auto from_chart = [&](const std::vector<FieldElement>& y) {
        Point x = a0;
        for (std::size_t i = 0; i < k; ++i)
            if (!y[i].is_zero())
                x = x + y[i] * (s.vertices[i + 1] - a0);
        return x;
    };
    // projection along w to the coordinates other than j, and position along w
    auto project = [&](const std::vector<FieldElement>& y) {
        FieldElement t = y[j] / w[j];
        Point q;
        for (std::size_t i = 0; i < k; ++i)
            if (i != j)
                q.push_back(y[i] - t * w[i]);
        return q;
    };
    auto lift = [&](const Point& q, const FieldElement& t) {
        std::vector<FieldElement> y(k);
        std::size_t c = 0;
        for (std::size_t i = 0; i < k; ++i)
            y[i] = i == j ? FieldElement() : q[c++];
        for (std::size_t i = 0; i < k; ++i)
            y[i] += t * w[i];
        return y;
    };

    std::vector<Point> shadow_corners;
    for (const auto& v : s.vertices)
        shadow_corners.push_back(project(to_chart(v)));
    std::vector<Cell> cells;
    for (const auto& t : triangulate_hull(shadow_corners))
        cells.push_back(cell_of_simplex(t));
    std::vector<std::pair<Point, FieldElement>> planes;
    for (const auto& piece : f.domain.maximal_simplexes()) {
        std::vector<Point> pv;
        for (const auto& v : piece.vertices)
            pv.push_back(project(to_chart(v)));
        for (auto& h : supporting_hyperplanes(Simplex(pv)))
            planes.push_back(std::move(h));
    }
    std::vector<Simplex> shadow;
    for (const auto& c : cut_cells(cells, planes))
        for (auto& t : pulling_triangulation(c))
            shadow.push_back(std::move(t));

    // the chord over q runs between positions lo(q) <= hi(q)
    auto chord = [&](const Point& q) {
        std::vector<FieldElement> base = lift(q, FieldElement());
        std::optional<FieldElement> lo, hi;
        auto bound = [&](const FieldElement& c0, const FieldElement& c1) {
            // c0 + c1 t >= 0
            if (c1.is_zero())
                return;
            FieldElement t = -c0 / c1;
            if (c1.sign() > 0) {
                if (!lo || t > *lo)
                    lo = t;
            } else if (!hi || t < *hi) {
                hi = t;
            }
        };
        FieldElement rest0 = 1, rest1 = 0;
        for (std::size_t i = 0; i < k; ++i) {
            bound(base[i], w[i]);
            rest0 -= base[i];
            rest1 -= w[i];
        }
        bound(rest0, rest1);
        return std::make_pair(*lo, *hi);
    };
    std::map<Point, Point, PointLess> value;
    std::vector<Simplex> pieces;
    std::map<Point, std::pair<FieldElement, FieldElement>, PointLess> chords;
    for (const auto& t : shadow) {
        std::vector<FieldElement> r, h;
        for (const auto& q : t.vertices) {
            auto it = chords.find(q);
            if (it == chords.end())
                it = chords.emplace(q, chord(q)).first;
            r.push_back(it->second.first);
            h.push_back(it->second.second);
        }
        for (const auto& p : prism_simplexes(t.vertices, r, h)) {
            std::vector<Point> xs;
            for (const auto& v : p.vertices) {
                Point q(v.begin(), v.end() - 1);
                Point x = from_chart(lift(q, v.back()));
                if (!value.count(x))
                    value.emplace(x, f.evaluate(x));
                xs.push_back(std::move(x));
            }
            pieces.emplace_back(std::move(xs));
        }
    }
    Complex dom = Complex::from_simplexes(pieces);
    std::vector<Point> imgs;
    for (const auto& v : dom.vertices())
        imgs.push_back(value.at(v));
    return PLMap(std::move(dom), std::move(imgs), f.codim);
}

/// Values of f at the vertices of K that lie in |L| or infinitesimally close
/// to it, taken at a nearest point of |L|; nullopt at the other vertices.
inline std::vector<std::optional<Point>> near_values(const VComplex& k, const Complex& l, const PLMap& f)
{
    if (!(f.domain == l))
        fail(ErrorKind::PreconditionViolation, "map must be defined on the subcomplex");
    for (const auto& s : l.simplexes()) {
        VertexSet ids;
        for (int v : s) {
            auto id = k.base.vertex_id(l.vertex(v));
            if (!id)
                fail(ErrorKind::PreconditionViolation, "L is not a subcomplex of K");
            ids.push_back(*id);
        }
        std::sort(ids.begin(), ids.end());
        if (!k.base.contains_set(ids))
            fail(ErrorKind::PreconditionViolation, "L is not a subcomplex of K");
    }
    std::vector<Simplex> lmax = l.maximal_simplexes();
    // an infinitely close point of t forces st(a) into the st of t's box
    std::vector<Box> boxes;
    std::vector<std::pair<Point, Point>> st_boxes;
    for (const auto& t : lmax) {
        boxes.emplace_back(t);
        st_boxes.emplace_back(standard_part(boxes.back().lo), standard_part(boxes.back().hi));
    }
    std::vector<std::optional<Point>> out;
    for (const auto& a : k.base.vertices()) {
        if (auto id = l.vertex_id(a)) {
            out.emplace_back(f.image(*id));
            continue;
        }
        Point sa = standard_part(a);
        // candidates by the distance to their box, which bounds the distance from below
        std::vector<std::pair<FieldElement, std::size_t>> cands;
        for (std::size_t j = 0; j < lmax.size(); ++j) {
            bool near = true;
            for (std::size_t i = 0; i < sa.size() && near; ++i)
                near = st_boxes[j].first[i] <= sa[i] && sa[i] <= st_boxes[j].second[i];
            if (!near)
                continue;
            FieldElement lb;
            for (std::size_t i = 0; i < a.size(); ++i)
                lb = max(lb, max(boxes[j].lo[i] - a[i], a[i] - boxes[j].hi[i]));
            cands.emplace_back(std::move(lb), j);
        }
        std::stable_sort(cands.begin(), cands.end(),
                         [](const auto& x, const auto& y) { return x.first < y.first; });
        std::optional<NearestPoint> best;
        for (const auto& [lb, j] : cands) {
            if (best && best->distance < lb)
                break;
            NearestPoint np = sup_distance_to_set(a, lmax[j]);
            if (!best || np.distance < best->distance ||
                (np.distance == best->distance && compare_points(np.point, best->point) < 0))
                best = np;
        }
        if (!best || !best->distance.is_infinitesimal())
            out.emplace_back();
        else
            out.emplace_back(f.evaluate(best->point));
    }
    return out;
}

/// Extension of f from a subcomplex L to all of K: vertices outside L take 0
/// when far from |L| and the value at a nearest point of |L| when
/// infinitesimally close; simplexes are then filled affinely.
inline PLMap extend_over_subcomplex(const VComplex& k, const Complex& l, const PLMap& f)
{
    std::vector<Point> imgs;
    for (auto& v : near_values(k, l, f))
        imgs.push_back(v ? std::move(*v) : Point(f.codim));
    // on every simplex of K not in L the boundary data is affine on each face,
    // so the chord construction reproduces the affine interpolation
    return PLMap(k.base, std::move(imgs), f.codim);
}

/// u lies in the direction space of no positive-dimensional simplex of X.
inline bool is_good_direction(const Point& u, const std::vector<Simplex>& xs)
{
    if (is_zero_vector(u))
        return false;
    for (const auto& s : xs) {
        if (s.dim() < 1)
            continue;
        require_same_dim(u, s.vertices[0]);
        if (in_linear_span(difference_vectors(s.vertices), u))
            return false;
    }
    return true;
}

inline std::size_t& direction_search_budget()
{
    static std::size_t budget = 10000;
    return budget;
}

/// Rational direction, good for X and for st(X), from small integer vectors
/// ordered by height; e_(n+1) comes first and the last coordinate is positive.
inline Point v_good_direction(const std::vector<Simplex>& xs, std::size_t ambient)
{
    std::vector<Simplex> st = st_of_simplex_union(xs);
    std::size_t tried = 0;
    auto accept = [&](const Point& u) {
        if (++tried > direction_search_budget())
            fail(ErrorKind::SearchExhausted, "no good direction within " + std::to_string(direction_search_budget()) + " candidates");
        return is_good_direction(u, xs) && is_good_direction(u, st);
    };
    Point up = unit_vector(ambient, ambient - 1);
    if (accept(up))
        return up;
    for (long h = 1;; ++h) {
        // all vectors of max-norm h with last coordinate in 1..h
        std::vector<long> c(ambient - 1, -h);
        for (;;) {
            for (long last = 1; last <= h; ++last) {
                bool height = last == h;
                for (long x : c)
                    height = height || x == h || x == -h;
                if (!height)
                    continue;
                Point u;
                for (long x : c)
                    u.emplace_back(x);
                u.emplace_back(last);
                if (u == up)
                    continue;
                if (accept(u))
                    return u;
            }
            std::size_t i = 0;
            while (i < c.size() && c[i] == h)
                c[i++] = -h;
            if (i == c.size())
                break;
            ++c[i];
        }
    }
}

/// (x', x_last) -> (x' - x_last u', x_last), taking u to the last unit vector.
struct Shear {
    Point shift;

    Point apply(const Point& p) const
    {
        Point q = p;
        for (std::size_t i = 0; i < shift.size(); ++i)
            q[i] -= p.back() * shift[i];
        return q;
    }

    Point unapply(const Point& p) const
    {
        Point q = p;
        for (std::size_t i = 0; i < shift.size(); ++i)
            q[i] += p.back() * shift[i];
        return q;
    }

    Simplex apply(const Simplex& s) const
    {
        Simplex r;
        for (const auto& v : s.vertices)
            r.vertices.push_back(apply(v));
        return r;
    }

    Simplex unapply(const Simplex& s) const
    {
        Simplex r;
        for (const auto& v : s.vertices)
            r.vertices.push_back(unapply(v));
        return r;
    }

    /// Matrix of the forward map.
    Matrix matrix() const
    {
        const std::size_t n = shift.size() + 1;
        Matrix m(n, std::vector<FieldElement>(n));
        for (std::size_t i = 0; i < n; ++i)
            m[i][i] = 1;
        for (std::size_t i = 0; i + 1 < n; ++i)
            m[i][n - 1] = -shift[i];
        return m;
    }
};

inline Shear shear_to_vertical(const Point& u)
{
    if (u.empty() || u.back().is_zero())
        fail(ErrorKind::PreconditionViolation, "direction must have a nonzero last coordinate");
    Point n = (1 / u.back()) * u;
    if (!is_v_bounded(n))
        fail(ErrorKind::PreconditionViolation, "normalized direction " + to_string(n) + " is not V-bounded");
    n.pop_back();
    return Shear{n};
}

} // namespace vtri
