#pragma once

#include "geometry.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace vtri {

/// Raised when two simplexes meet outside a common face.
class IntersectionViolation : public Error {
public:
    IntersectionViolation(Simplex a, Simplex b, Point witness)
        : Error(ErrorKind::IntersectionViolation,
                to_string(a) + " and " + to_string(b) + " meet at " + to_string(witness) +
                    " outside a common face"),
          first(std::move(a)), second(std::move(b)), point(std::move(witness))
    {
    }

    Simplex first, second;
    Point point;
};

using VertexSet = std::vector<int>;

/// Face-closed collection of simplexes. Vertices get identifiers in
/// lexicographic order of their coordinates; simplexes are sorted vertex-id
/// sets, listed by dimension and then lexicographically.
class Complex {
public:
    Complex() = default;

    /// Builds the face closure of the given simplexes without checking how they meet.
    static Complex from_simplexes(const std::vector<Simplex>& input)
    {
        Complex k;
        std::vector<Point> pts;
        for (const auto& s : input) {
            if (s.vertices.empty())
                fail(ErrorKind::PreconditionViolation, "simplex with no vertices");
            if (!affinely_independent(s.vertices))
                fail(ErrorKind::PreconditionViolation, "vertices of " + to_string(s) + " are affinely dependent");
            for (const auto& v : s.vertices)
                pts.push_back(v);
        }
        k.vertices_ = unique_points(std::move(pts));
        for (std::size_t i = 0; i < k.vertices_.size(); ++i) {
            if (k.vertices_[i].size() != k.vertices_[0].size())
                fail(ErrorKind::DimensionMismatch, "vertices of different dimensions");
            k.index_.emplace(k.vertices_[i], static_cast<int>(i));
        }
        std::set<VertexSet> all;
        for (const auto& s : input) {
            VertexSet ids;
            for (const auto& v : s.vertices)
                ids.push_back(k.index_.at(v));
            std::sort(ids.begin(), ids.end());
            add_faces(ids, all);
        }
        k.set_simplexes(all);
        return k;
    }

    /// Complex from a vertex list and vertex-id sets, closing under faces.
    static Complex from_ids(const std::vector<Point>& vertices, const std::vector<VertexSet>& sets)
    {
        std::vector<Simplex> s;
        for (const auto& ids : sets) {
            std::vector<Point> pts;
            for (int i : ids)
                pts.push_back(vertices.at(static_cast<std::size_t>(i)));
            s.emplace_back(std::move(pts));
        }
        return from_simplexes(s);
    }

    std::size_t ambient() const { return vertices_.empty() ? 0 : vertices_[0].size(); }
    bool empty() const { return vertices_.empty(); }
    const std::vector<Point>& vertices() const { return vertices_; }
    const Point& vertex(int id) const { return vertices_.at(static_cast<std::size_t>(id)); }
    const std::vector<VertexSet>& simplexes() const { return simplexes_; }
    std::size_t size() const { return simplexes_.size(); }

    std::optional<int> vertex_id(const Point& p) const
    {
        auto it = index_.find(p);
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    bool contains_set(const VertexSet& ids) const { return lookup_.count(ids) > 0; }

    int dim() const
    {
        int d = -1;
        for (const auto& s : simplexes_)
            d = std::max(d, static_cast<int>(s.size()) - 1);
        return d;
    }

    Simplex simplex(const VertexSet& ids) const
    {
        std::vector<Point> pts;
        for (int i : ids)
            pts.push_back(vertex(i));
        return Simplex(std::move(pts));
    }

    std::vector<Simplex> all_simplexes() const
    {
        std::vector<Simplex> out;
        for (const auto& s : simplexes_)
            out.push_back(simplex(s));
        return out;
    }

    /// Vertex-id sets of simplexes that are not proper faces of others.
    const std::vector<VertexSet>& maximal() const { return maximal_; }

    std::vector<Simplex> maximal_simplexes() const
    {
        std::vector<Simplex> out;
        for (const auto& s : maximal_)
            out.push_back(simplex(s));
        return out;
    }

    /// Number of simplexes of each dimension.
    std::vector<std::size_t> f_vector() const
    {
        std::vector<std::size_t> f(static_cast<std::size_t>(dim() + 1));
        for (const auto& s : simplexes_)
            ++f[s.size() - 1];
        return f;
    }

    /// Whether p lies in the bounding box of the simplex ids.
    bool box_holds(const VertexSet& ids, const Point& p) const
    {
        for (std::size_t i = 0; i < p.size(); ++i) {
            bool below = false, above = false;
            for (int v : ids) {
                const FieldElement& c = vertices_[static_cast<std::size_t>(v)][i];
                below = below || c <= p[i];
                above = above || c >= p[i];
            }
            if (!below || !above)
                return false;
        }
        return true;
    }

    /// Smallest simplex whose relative interior contains p, if p lies in |K|.
    std::optional<VertexSet> carrier(const Point& p) const
    {
        if (auto id = vertex_id(p))
            return VertexSet{*id};
        for (const auto& m : maximal_) {
            if (!box_holds(m, p))
                continue;
            auto coords = affine_coordinates(simplex(m), p);
            if (!coords)
                continue;
            bool inside = true;
            VertexSet support;
            for (std::size_t i = 0; i < m.size(); ++i) {
                int sg = (*coords)[i].sign();
                if (sg < 0)
                    inside = false;
                else if (sg > 0)
                    support.push_back(m[i]);
            }
            if (inside)
                return support;
        }
        return std::nullopt;
    }

    friend bool operator==(const Complex& a, const Complex& b)
    {
        return a.vertices_ == b.vertices_ && a.simplexes_ == b.simplexes_;
    }

private:
    static void add_faces(const VertexSet& ids, std::set<VertexSet>& out)
    {
        if (ids.empty() || !out.insert(ids).second)
            return;
        if (ids.size() == 1)
            return;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            VertexSet f;
            for (std::size_t j = 0; j < ids.size(); ++j)
                if (j != i)
                    f.push_back(ids[j]);
            add_faces(f, out);
        }
    }

    void set_simplexes(const std::set<VertexSet>& all)
    {
        simplexes_.assign(all.begin(), all.end());
        std::stable_sort(simplexes_.begin(), simplexes_.end(),
                         [](const VertexSet& a, const VertexSet& b) { return a.size() < b.size(); });
        lookup_ = all;
        // a simplex is maximal iff no simplex with one more vertex contains it
        std::set<VertexSet> covered;
        for (const auto& s : simplexes_) {
            if (s.size() < 2)
                continue;
            for (std::size_t i = 0; i < s.size(); ++i) {
                VertexSet f;
                for (std::size_t j = 0; j < s.size(); ++j)
                    if (j != i)
                        f.push_back(s[j]);
                covered.insert(f);
            }
        }
        for (const auto& s : simplexes_)
            if (!covered.count(s))
                maximal_.push_back(s);
    }

    std::vector<Point> vertices_;
    std::map<Point, int, PointLess> index_;
    std::vector<VertexSet> simplexes_;
    std::vector<VertexSet> maximal_;
    std::set<VertexSet> lookup_;
};

/// A point of S and S' that lies outside the face spanned by their shared
/// vertices, if any. One LP maximizes the weight of S on unshared vertices
/// over S and S'.
inline std::optional<Point> improper_intersection(const Simplex& s, const Simplex& t)
{
    const std::size_t m = s.vertices.size(), k = t.vertices.size(), n = s.ambient();
    std::vector<bool> shared(m, false);
    bool any_outside = false;
    for (std::size_t i = 0; i < m; ++i) {
        shared[i] = std::find(t.vertices.begin(), t.vertices.end(), s.vertices[i]) != t.vertices.end();
        any_outside = any_outside || !shared[i];
    }
    if (!any_outside)
        return std::nullopt;
    LinearProgram lp(m + k);
    for (std::size_t j = 0; j < m + k; ++j)
        lp.nonnegative[j] = true;
    std::vector<FieldElement> sa(m + k), sb(m + k);
    for (std::size_t i = 0; i < m; ++i)
        sa[i] = 1;
    for (std::size_t j = 0; j < k; ++j)
        sb[m + j] = 1;
    lp.add(sa, Relation::Equal, FieldElement(1));
    lp.add(sb, Relation::Equal, FieldElement(1));
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<FieldElement> row(m + k);
        for (std::size_t i = 0; i < m; ++i)
            row[i] = s.vertices[i][c];
        for (std::size_t j = 0; j < k; ++j)
            row[m + j] = -t.vertices[j][c];
        lp.add(row, Relation::Equal, FieldElement(0));
    }
    for (std::size_t i = 0; i < m; ++i)
        if (!shared[i])
            lp.objective[i] = 1;
    LPOutcome res = solve_lp(lp);
    if (!res.optimal() || res.value.is_zero())
        return std::nullopt;
    std::vector<FieldElement> w(res.point.begin(), res.point.begin() + static_cast<std::ptrdiff_t>(m));
    return affine_combination(s.vertices, w);
}

namespace detail {

/// Candidate pairs of simplexes whose bounding boxes overlap, by a sweep on
/// the first coordinate.
inline std::vector<std::pair<std::size_t, std::size_t>> overlapping_pairs(const std::vector<Simplex>& ss)
{
    std::vector<Box> boxes;
    for (const auto& s : ss)
        boxes.emplace_back(s);
    std::vector<std::size_t> order(ss.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    if (ss.empty() || ss[0].ambient() == 0)
        return {};
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return boxes[a].lo[0] < boxes[b].lo[0]; });
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t x = 0; x < order.size(); ++x)
        for (std::size_t y = x + 1; y < order.size(); ++y) {
            if (boxes[order[x]].hi[0] < boxes[order[y]].lo[0])
                break;
            if (boxes[order[x]].meets(boxes[order[y]]))
                out.emplace_back(std::min(order[x], order[y]), std::max(order[x], order[y]));
        }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

namespace detail {

/// Exact ranks of the vertices of K along a fixed set of small integer
/// directions. Two simplexes whose rank ranges are disjoint along some
/// direction are disjoint; when the ranges only touch and the vertices on the
/// touching plane are the same on both sides, they meet in that common face.
class DirectionRanks {
public:
    explicit DirectionRanks(const Complex& k) : k_(k)
    {
        const std::size_t n = k.ambient();
        std::vector<Point> dirs;
        for (std::size_t i = 0; i < n; ++i)
            dirs.push_back(unit_vector(n, i));
        if (n <= 3) {
            std::vector<int> c(n, -2);
            for (;;) {
                auto first = std::find_if(c.begin(), c.end(), [](int x) { return x != 0; });
                if (first != c.end() && *first > 0 &&
                    std::count(c.begin(), c.end(), 0) + 1 != static_cast<std::ptrdiff_t>(n)) {
                    Point w;
                    for (int x : c)
                        w.emplace_back(Rational(x));
                    dirs.push_back(std::move(w));
                }
                std::size_t i = 0;
                while (i < n && c[i] == 2)
                    c[i++] = -2;
                if (i == n)
                    break;
                ++c[i];
            }
        }
        const auto& verts = k.vertices();
        for (const auto& w : dirs) {
            std::vector<FieldElement> vals;
            for (const auto& v : verts)
                vals.push_back(dot(w, v));
            std::vector<std::size_t> order(verts.size());
            for (std::size_t i = 0; i < order.size(); ++i)
                order[i] = i;
            std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return vals[x] < vals[y]; });
            std::vector<int> r(verts.size());
            int cur = 0;
            for (std::size_t i = 0; i < order.size(); ++i) {
                if (i > 0 && vals[order[i]] != vals[order[i - 1]])
                    ++cur;
                r[order[i]] = cur;
            }
            ranks_.push_back(std::move(r));
        }
    }

    bool separates(const VertexSet& s, const VertexSet& t) const
    {
        for (const auto& r : ranks_) {
            auto range = [&](const VertexSet& x) {
                int lo = r[static_cast<std::size_t>(x[0])], hi = lo;
                for (int v : x) {
                    lo = std::min(lo, r[static_cast<std::size_t>(v)]);
                    hi = std::max(hi, r[static_cast<std::size_t>(v)]);
                }
                return std::make_pair(lo, hi);
            };
            auto [slo, shi] = range(s);
            auto [tlo, thi] = range(t);
            if (shi < tlo || thi < slo)
                return true;
            // touching: the part of one side on the plane must be a face of the other
            auto on_plane_within = [&](const VertexSet& x, int level, const VertexSet& other) {
                for (int v : x)
                    if (r[static_cast<std::size_t>(v)] == level && !std::binary_search(other.begin(), other.end(), v))
                        return false;
                return true;
            };
            if (shi == tlo && (on_plane_within(s, shi, t) || on_plane_within(t, tlo, s)))
                return true;
            if (thi == slo && (on_plane_within(t, thi, s) || on_plane_within(s, slo, t)))
                return true;
        }
        return false;
    }

    /// Pairs of maximal simplexes whose rank boxes along the axes overlap.
    std::vector<std::pair<std::size_t, std::size_t>> candidate_pairs() const
    {
        const auto& ms = k_.maximal();
        const std::size_t n = k_.ambient();
        std::vector<std::vector<int>> lo(ms.size(), std::vector<int>(n)), hi = lo;
        for (std::size_t i = 0; i < ms.size(); ++i)
            for (std::size_t a = 0; a < n; ++a) {
                lo[i][a] = hi[i][a] = ranks_[a][static_cast<std::size_t>(ms[i][0])];
                for (int v : ms[i]) {
                    lo[i][a] = std::min(lo[i][a], ranks_[a][static_cast<std::size_t>(v)]);
                    hi[i][a] = std::max(hi[i][a], ranks_[a][static_cast<std::size_t>(v)]);
                }
            }
        std::vector<std::size_t> order(ms.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::vector<std::pair<std::size_t, std::size_t>> out;
        if (n == 0)
            return out;
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return lo[x][0] < lo[y][0]; });
        for (std::size_t x = 0; x < order.size(); ++x)
            for (std::size_t y = x + 1; y < order.size(); ++y) {
                std::size_t i = order[x], j = order[y];
                if (hi[i][0] < lo[j][0])
                    break;
                bool meet = true;
                for (std::size_t a = 1; a < n && meet; ++a)
                    meet = !(hi[i][a] < lo[j][a] || hi[j][a] < lo[i][a]);
                if (meet)
                    out.emplace_back(std::min(i, j), std::max(i, j));
            }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    const Complex& k_;
    std::vector<std::vector<int>> ranks_;
};

/// Side tests of vertices against facet hyperplanes of the maximal
/// simplexes, cached by (simplex, facet, vertex).
class FacetSides {
public:
    explicit FacetSides(const Complex& k) : k_(k) {}

    /// True when a facet hyperplane of simplex i has simplex j on its far
    /// closed side and every vertex of j on it is a vertex of i; then the
    /// two meet in a common face.
    bool separates(std::size_t i, std::size_t j)
    {
        const VertexSet& s = k_.maximal()[i];
        const VertexSet& t = k_.maximal()[j];
        if (s.size() != k_.ambient() + 1)
            return false;
        for (std::size_t r = 0; r < s.size(); ++r) {
            if (std::binary_search(t.begin(), t.end(), s[r]))
                continue;
            bool ok = true;
            for (int v : t) {
                if (std::binary_search(s.begin(), s.end(), v))
                    continue;
                if (side(i, r, v) <= 0) {
                    ok = false;
                    break;
                }
            }
            if (ok)
                return true;
        }
        return false;
    }

    /// True when a hyperplane through all shared vertices and further
    /// vertices of either simplex puts them on opposite closed sides and
    /// their parts on the plane meet in a common face.
    bool separated_through_shared(std::size_t i, std::size_t j)
    {
        const VertexSet& s = k_.maximal()[i];
        const VertexSet& t = k_.maximal()[j];
        std::optional<Split> split;
        if (auto r = split_through_shared(s, t, nullptr, split))
            return *r;
        if (!split)
            return false;
        // both simplexes meet the plane in the faces split->a and split->b,
        // so they meet properly when those faces do within the plane
        std::vector<poly::Poly> normal(split->plane.begin(), split->plane.end() - 1);
        std::optional<Split> inner;
        if (auto r = split_through_shared(split->a, split->b, &normal, inner))
            return *r;
        return !improper_intersection(k_.simplex(split->a), k_.simplex(split->b));
    }

    /// For disjoint-looking simplexes of R^3: a plane through an edge of
    /// one and parallel to an edge of the other with them strictly apart.
    bool separated_by_edges(std::size_t i, std::size_t j)
    {
        const VertexSet& s = k_.maximal()[i];
        const VertexSet& t = k_.maximal()[j];
        if (k_.ambient() != 3)
            return false;
        VertexSet shared;
        std::set_intersection(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(shared));
        if (!shared.empty())
            return false;
        for (std::size_t a = 0; a < s.size(); ++a)
            for (std::size_t b = a + 1; b < s.size(); ++b)
                for (std::size_t c = 0; c < t.size(); ++c)
                    for (std::size_t d = c + 1; d < t.size(); ++d)
                        if (edge_plane_separates(s, s[a], edge(s[a], s[b]), edge(t[c], t[d]), t))
                            return true;
        return false;
    }

private:
    struct Split {
        std::vector<poly::Poly> plane;
        VertexSet a, b;
    };

    /// Tries hyperplanes through the shared vertices of s and t and further
    /// vertices of either, plus the direction normal when given. True when
    /// one separates them with the parts on it within the other; otherwise
    /// first records a separating plane whose parts on it cross.
    std::optional<bool> split_through_shared(const VertexSet& s, const VertexSet& t,
                                             const std::vector<poly::Poly>* normal, std::optional<Split>& first)
    {
        const std::size_t n = k_.ambient();
        VertexSet shared, others;
        std::set_intersection(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(shared));
        const std::size_t span = normal ? n - 1 : n;
        if (shared.empty() || shared.size() > span)
            return std::nullopt;
        std::set_symmetric_difference(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(others));
        const std::size_t need = span - shared.size();
        if (need > others.size())
            return std::nullopt;
        std::optional<HomogeneousPoint> lifted;
        if (normal) {
            // a point off the plane, so the hyperplanes cut it in flats
            const HomogeneousPoint& o = hom(shared[0]);
            lifted = o;
            for (std::size_t c = 0; c < n; ++c)
                (*lifted)[c] = poly::add(o[c], poly::mul((*normal)[c], o[n]));
        }
        std::vector<std::size_t> pick(need);
        std::map<int, int> orient;
        std::function<std::optional<bool>(std::size_t, std::size_t)> choose =
            [&](std::size_t depth, std::size_t start) -> std::optional<bool> {
            if (depth < need) {
                for (std::size_t p = start; p < others.size(); ++p) {
                    pick[depth] = p;
                    if (auto r = choose(depth + 1, p + 1))
                        return r;
                }
                return std::nullopt;
            }
            std::vector<HomogeneousPoint> pts;
            for (int v : shared)
                pts.push_back(hom(v));
            for (auto p : pick)
                pts.push_back(hom(others[p]));
            if (lifted)
                pts.push_back(*lifted);
            auto h = hyperplane_through(pts);
            orient.clear();
            bool any = false;
            for (const VertexSet* x : {&s, &t})
                for (int v : *x)
                    if (!orient.count(v)) {
                        int o = side_of(h, hom(v));
                        orient[v] = o;
                        any = any || o != 0;
                    }
            if (!any)
                return std::nullopt;
            auto range = [&](const VertexSet& x, int& lo, int& hi) {
                lo = 1;
                hi = -1;
                for (int v : x) {
                    lo = std::min(lo, orient[v]);
                    hi = std::max(hi, orient[v]);
                }
            };
            int slo, shi, tlo, thi;
            range(s, slo, shi);
            range(t, tlo, thi);
            if (!((shi <= 0 && tlo >= 0) || (slo >= 0 && thi <= 0)))
                return std::nullopt;
            VertexSet a, b;
            for (int v : s)
                if (orient[v] == 0)
                    a.push_back(v);
            for (int v : t)
                if (orient[v] == 0)
                    b.push_back(v);
            if (std::includes(t.begin(), t.end(), a.begin(), a.end()) ||
                std::includes(s.begin(), s.end(), b.begin(), b.end()))
                return true;
            if (!first)
                first = Split{std::move(h), std::move(a), std::move(b)};
            return std::nullopt;
        };
        return choose(0, 0);
    }

    /// Direction of v - u up to a positive factor.
    const std::vector<poly::Poly>& edge(int u, int v)
    {
        auto key = std::make_pair(u, v);
        auto it = edges_.find(key);
        if (it != edges_.end())
            return it->second;
        return edges_.emplace(key, relative(hom(u), hom(v))).first->second;
    }

    static std::vector<poly::Poly> relative(const HomogeneousPoint& u, const HomogeneousPoint& v)
    {
        const std::size_t n = u.size() - 1;
        std::vector<poly::Poly> out;
        for (std::size_t c = 0; c < n; ++c)
            out.push_back(poly::sub(poly::mul(v[c], u[n]), poly::mul(u[c], v[n])));
        return out;
    }

    bool edge_plane_separates(const VertexSet& s, int base, const std::vector<poly::Poly>& e1,
                              const std::vector<poly::Poly>& e2, const VertexSet& t)
    {
        std::vector<poly::Poly> w = {
            poly::sub(poly::mul(e1[1], e2[2]), poly::mul(e1[2], e2[1])),
            poly::sub(poly::mul(e1[2], e2[0]), poly::mul(e1[0], e2[2])),
            poly::sub(poly::mul(e1[0], e2[1]), poly::mul(e1[1], e2[0])),
        };
        if (std::all_of(w.begin(), w.end(), [](const poly::Poly& p) { return poly::ord(p) < 0; }))
            return false;
        const HomogeneousPoint& o = hom(base);
        auto side = [&](int v) {
            auto r = relative(o, hom(v));
            poly::Poly total;
            for (std::size_t c = 0; c < 3; ++c)
                total = poly::add(total, poly::mul(w[c], r[c]));
            return detail::poly_sign(total);
        };
        int slo = 1, shi = -1;
        for (int v : s) {
            int sg = side(v);
            slo = std::min(slo, sg);
            shi = std::max(shi, sg);
            if (slo < 0 && shi > 0)
                return false;
        }
        int tlo = 1, thi = -1;
        for (int v : t) {
            int sg = side(v);
            tlo = std::min(tlo, sg);
            thi = std::max(thi, sg);
            if (tlo <= 0 && thi >= 0)
                return false;
        }
        return (shi <= 0 && tlo > 0) || (slo >= 0 && thi < 0);
    }

    const HomogeneousPoint& hom(int v)
    {
        auto it = hom_.find(v);
        if (it == hom_.end())
            it = hom_.emplace(v, homogeneous(k_.vertex(v))).first;
        return it->second;
    }

    /// Positive on the side of facet r of simplex i away from its opposite vertex.
    int side(std::size_t i, std::size_t r, int v)
    {
        auto key = std::make_tuple(i, r, v);
        auto it = memo_.find(key);
        if (it != memo_.end())
            return it->second;
        auto pk = std::make_pair(i, r);
        auto pt = planes_.find(pk);
        if (pt == planes_.end()) {
            const VertexSet& s = k_.maximal()[i];
            std::vector<HomogeneousPoint> facet;
            for (std::size_t q = 0; q < s.size(); ++q)
                if (q != r)
                    facet.push_back(hom(s[q]));
            auto h = hyperplane_through(facet);
            if (side_of(h, hom(s[r])) > 0)
                for (auto& c : h)
                    c = poly::scale(c, Rational(-1));
            pt = planes_.emplace(pk, std::move(h)).first;
        }
        int sg = side_of(pt->second, hom(v));
        memo_.emplace(key, sg);
        return sg;
    }

    const Complex& k_;
    std::map<int, HomogeneousPoint> hom_;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<poly::Poly>> planes_;
    std::map<std::pair<int, int>, std::vector<poly::Poly>> edges_;
    std::map<std::tuple<std::size_t, std::size_t, int>, int> memo_;
};

} // namespace detail

/// First pair of maximal simplexes meeting outside a common face.
inline std::optional<IntersectionViolation> find_intersection_violation(const Complex& k)
{
    std::vector<Simplex> ms = k.maximal_simplexes();
    const auto& ids = k.maximal();
    detail::DirectionRanks ranks(k);
    detail::FacetSides sides(k);
    for (auto [i, j] : ranks.candidate_pairs()) {
        if (ranks.separates(ids[i], ids[j]) || sides.separates(i, j) || sides.separates(j, i) ||
            sides.separated_through_shared(i, j) || sides.separated_by_edges(i, j))
            continue;
        if (auto w = improper_intersection(ms[i], ms[j]))
            return IntersectionViolation(ms[i], ms[j], *w);
    }
    return std::nullopt;
}

/// Face closure plus the exact intersection check.
inline Complex validate_complex(const std::vector<Simplex>& simplexes)
{
    Complex k = Complex::from_simplexes(simplexes);
    if (auto v = find_intersection_violation(k))
        throw *v;
    return k;
}

/// A face of some listed simplex that is missing from the list.
inline std::optional<Simplex> missing_face(const std::vector<Simplex>& listed)
{
    std::map<Point, int, PointLess> id;
    std::vector<Point> points;
    std::set<VertexSet> have;
    for (const auto& s : listed) {
        VertexSet v;
        for (const auto& p : s.vertices) {
            auto [it, fresh] = id.emplace(p, static_cast<int>(points.size()));
            if (fresh)
                points.push_back(p);
            v.push_back(it->second);
        }
        std::sort(v.begin(), v.end());
        have.insert(v);
    }
    for (const auto& v : have) {
        if (v.size() < 2)
            continue;
        for (std::size_t i = 0; i < v.size(); ++i) {
            VertexSet f = v;
            f.erase(f.begin() + static_cast<std::ptrdiff_t>(i));
            if (!have.count(f)) {
                std::vector<Point> pts;
                for (int x : f)
                    pts.push_back(points[static_cast<std::size_t>(x)]);
                std::sort(pts.begin(), pts.end(), PointLess());
                return Simplex(pts);
            }
        }
    }
    return std::nullopt;
}

/// Complex whose standard part is again a complex.
struct VComplex {
    Complex base;
    Complex st;
    /// base vertex id -> st vertex id
    std::vector<int> st_vertex;

    std::size_t ambient() const { return base.ambient(); }
};

/// Distinct standard parts of the vertices of a simplex, in vertex order.
inline std::vector<Point> distinct_st_vertices(const Simplex& s)
{
    std::vector<Point> out;
    for (const auto& v : s.vertices) {
        Point p = standard_part(v);
        if (std::find(out.begin(), out.end(), p) == out.end())
            out.push_back(std::move(p));
    }
    return out;
}

inline VComplex make_vcomplex(Complex k)
{
    VComplex vk;
    for (const auto& v : k.vertices())
        if (!is_v_bounded(v))
            fail(ErrorKind::NotFinite, "vertex " + to_string(v) + " is not V-bounded");
    std::map<Point, int, PointLess> st_id;
    std::vector<Point> st_points;
    for (const auto& v : k.vertices()) {
        auto [it, fresh] = st_id.emplace(standard_part(v), static_cast<int>(st_points.size()));
        if (fresh)
            st_points.push_back(it->first);
    }
    std::set<VertexSet> seen;
    std::vector<Simplex> st;
    for (const auto& m : k.maximal()) {
        VertexSet ids;
        for (int v : m)
            ids.push_back(st_id.at(standard_part(k.vertex(v))));
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        if (!seen.insert(ids).second)
            continue;
        std::vector<Point> sv;
        for (int i : ids)
            sv.push_back(st_points[static_cast<std::size_t>(i)]);
        if (!affinely_independent(sv))
            fail(ErrorKind::NotVComplex, "standard part of " + to_string(k.simplex(m)) + " is not a simplex");
        st.emplace_back(std::move(sv));
    }
    try {
        vk.st = validate_complex(st);
    } catch (const IntersectionViolation& v) {
        fail(ErrorKind::NotVComplex, std::string("standard parts are not a complex: ") + v.what());
    }
    for (const auto& v : k.vertices())
        vk.st_vertex.push_back(*vk.st.vertex_id(standard_part(v)));
    vk.base = std::move(k);
    return vk;
}

inline bool is_vcomplex(const Complex& k)
{
    try {
        make_vcomplex(k);
        return true;
    } catch (const Error&) {
        return false;
    }
}

/// Start indices of the blocks of equal consecutive points when the block
/// representatives are affinely independent.
inline std::optional<std::vector<std::size_t>> is_simplicial_sequence(const std::vector<Point>& pts)
{
    if (pts.empty())
        return std::nullopt;
    std::vector<std::size_t> starts{0};
    std::vector<Point> reps{pts[0]};
    for (std::size_t i = 1; i < pts.size(); ++i) {
        require_same_dim(pts[i], pts[0]);
        if (pts[i] != pts[i - 1]) {
            starts.push_back(i);
            reps.push_back(pts[i]);
        }
    }
    if (!affinely_independent(reps))
        return std::nullopt;
    return starts;
}

struct VSimplexOrder {
    /// order[i] is the index in the input vertex list of the i-th vertex.
    std::vector<std::size_t> order;
    std::vector<std::size_t> block_starts;
    Simplex ordered;

    std::size_t block_of(std::size_t i) const
    {
        return static_cast<std::size_t>(std::upper_bound(block_starts.begin(), block_starts.end(), i) -
                                        block_starts.begin()) -
               1;
    }

    std::size_t block_size(std::size_t b) const
    {
        std::size_t end = b + 1 < block_starts.size() ? block_starts[b + 1] : order.size();
        return end - block_starts[b];
    }
};

/// Orders the vertices so that their standard parts form a simplicial
/// sequence, grouping the vertices of each st-class together.
inline VSimplexOrder v_simplex_order(const Simplex& s)
{
    std::vector<Point> st;
    for (const auto& v : s.vertices) {
        if (!is_v_bounded(v))
            fail(ErrorKind::NotFinite, "vertex " + to_string(v) + " is not V-bounded");
        st.push_back(standard_part(v));
    }
    VSimplexOrder r;
    r.order.resize(s.vertices.size());
    for (std::size_t i = 0; i < r.order.size(); ++i)
        r.order[i] = i;
    // classes are ordered by first appearance, members keep their input order
    std::vector<std::size_t> first(st.size());
    for (std::size_t i = 0; i < st.size(); ++i)
        first[i] = static_cast<std::size_t>(std::find(st.begin(), st.end(), st[i]) - st.begin());
    std::stable_sort(r.order.begin(), r.order.end(),
                     [&](std::size_t a, std::size_t b) { return first[a] < first[b]; });
    std::vector<Point> seq;
    for (auto i : r.order) {
        seq.push_back(st[i]);
        r.ordered.vertices.push_back(s.vertices[i]);
    }
    auto starts = is_simplicial_sequence(seq);
    if (!starts) {
        std::string pts;
        for (const auto& p : unique_points(seq))
            pts += " " + to_string(p);
        fail(ErrorKind::NotVSimplex, "standard parts of the vertices are affinely dependent:" + pts);
    }
    r.block_starts = *starts;
    return r;
}

/// Whether st of the face complex of S is a complex, checked
/// directly on the standard parts of all faces.
inline bool st_faces_form_complex(const Simplex& s)
{
    Complex faces = Complex::from_simplexes({s});
    std::vector<Simplex> st;
    for (const auto& f : faces.simplexes()) {
        std::vector<Point> sv = distinct_st_vertices(faces.simplex(f));
        if (!affinely_independent(sv))
            return false;
        st.emplace_back(std::move(sv));
    }
    return !find_intersection_violation(Complex::from_simplexes(st));
}

/// Point of S° whose standard part is the barycenter of st(S).
inline Point choose_interior_point(const VSimplexOrder& o)
{
    const std::size_t blocks = o.block_starts.size();
    Point x(o.ordered.ambient());
    for (std::size_t i = 0; i < o.order.size(); ++i) {
        Rational t(1, static_cast<long>(blocks * o.block_size(o.block_of(i))));
        x = x + FieldElement(t) * o.ordered.vertices[i];
    }
    return x;
}

inline Point choose_interior_point(const Simplex& s) { return choose_interior_point(v_simplex_order(s)); }

/// Maximal simplexes [b_0..b_i, c_i..c_m] with b_i != c_i over ordered
/// vertices a, where b_i = (a_i, r_i) and c_i = (a_i, s_i).
inline std::vector<Simplex> prism_simplexes(const std::vector<Point>& a, const std::vector<FieldElement>& r,
                                            const std::vector<FieldElement>& s)
{
    const std::size_t m = a.size();
    auto lift = [](const Point& p, const FieldElement& h) {
        Point q = p;
        q.push_back(h);
        return q;
    };
    std::vector<Simplex> out;
    bool any = false;
    for (std::size_t i = 0; i < m; ++i) {
        if (r[i] == s[i])
            continue;
        any = true;
        std::vector<Point> v;
        for (std::size_t j = 0; j <= i; ++j)
            v.push_back(lift(a[j], r[j]));
        for (std::size_t j = i; j < m; ++j)
            v.push_back(lift(a[j], s[j]));
        out.emplace_back(std::move(v));
    }
    if (!any) {
        std::vector<Point> v;
        for (std::size_t j = 0; j < m; ++j)
            v.push_back(lift(a[j], r[j]));
        out.emplace_back(std::move(v));
    }
    return out;
}

/// Prism complex between r and s over a V-simplex with a simplicial vertex
/// order. The result is checked to be a V-complex covering the hull of the b_i, c_i.
inline VComplex prism_complex(const VSimplexOrder& o, const std::vector<FieldElement>& r,
                              const std::vector<FieldElement>& s)
{
    const std::size_t m = o.order.size();
    if (r.size() != m || s.size() != m)
        fail(ErrorKind::DimensionMismatch, "prism heights do not match the vertex count");
    std::vector<Point> st;
    for (const auto& v : o.ordered.vertices)
        st.push_back(standard_part(v));
    auto starts = is_simplicial_sequence(st);
    if (!starts || *starts != o.block_starts)
        fail(ErrorKind::PreconditionViolation, "vertex order is not simplicial with the given blocks");
    for (std::size_t i = 0; i < m; ++i) {
        if (!r[i].is_finite() || !s[i].is_finite())
            fail(ErrorKind::PreconditionViolation, "prism heights must be finite");
        if (r[i] > s[i])
            fail(ErrorKind::PreconditionViolation, "lower height exceeds upper height at vertex " + std::to_string(i));
        std::size_t b = o.block_starts[o.block_of(i)];
        if (r[i].standard_part() != r[b].standard_part() || s[i].standard_part() != s[b].standard_part())
            fail(ErrorKind::PreconditionViolation,
                 "standard parts of the heights are not constant on block " + std::to_string(o.block_of(i)));
    }
    std::vector<Simplex> maxl = prism_simplexes(o.ordered.vertices, r, s);
    VComplex l = make_vcomplex(validate_complex(maxl));
    std::vector<Point> corners;
    for (std::size_t i = 0; i < m; ++i) {
        Point b = o.ordered.vertices[i], c = o.ordered.vertices[i];
        b.push_back(r[i]);
        c.push_back(s[i]);
        corners.push_back(b);
        corners.push_back(c);
    }
    if (auto w = union_difference_witness(maxl, triangulate_hull(corners)))
        fail(ErrorKind::VerificationFailed, "prism complex differs from the hull at " + to_string(*w));
    return l;
}

/// Subdivision whose simplexes are [b(S_0), ..., b(S_k)] over flags
/// S_0 < S_1 < ... < S_k of K.
inline VComplex flag_subdivision(const VComplex& k, const std::function<Point(const Simplex&)>& b)
{
    const Complex& base = k.base;
    std::map<VertexSet, Point> centre;
    for (const auto& ids : base.simplexes()) {
        Simplex s = base.simplex(ids);
        Point p = ids.size() == 1 ? s.vertices[0] : b(s);
        if (ids.size() > 1 && !contains_in_interior(s, p))
            fail(ErrorKind::PreconditionViolation, "chosen point " + to_string(p) + " is not interior to " + to_string(s));
        std::vector<Point> sv = distinct_st_vertices(s);
        if (standard_part(p) != Simplex(sv).barycenter())
            fail(ErrorKind::PreconditionViolation,
                 "standard part of the chosen point for " + to_string(s) + " is not the standard barycenter");
        centre.emplace(ids, std::move(p));
    }
    std::vector<Simplex> out;
    std::vector<Point> chain;
    std::function<void(const VertexSet&)> descend = [&](const VertexSet& s) {
        chain.push_back(centre.at(s));
        if (s.size() == 1) {
            out.emplace_back(chain);
        } else {
            for (std::size_t i = 0; i < s.size(); ++i) {
                VertexSet f;
                for (std::size_t j = 0; j < s.size(); ++j)
                    if (j != i)
                        f.push_back(s[j]);
                descend(f);
            }
        }
        chain.pop_back();
    };
    for (const auto& m : base.maximal())
        descend(m);
    return make_vcomplex(Complex::from_simplexes(out));
}

inline VComplex flag_subdivision(const VComplex& k)
{
    return flag_subdivision(k, [](const Simplex& s) { return choose_interior_point(s); });
}

/// (N, C, E): vertex count, simplexes as label sets, and st-equality classes
/// (class index per label, numbered by first occurrence).
struct ComplexType {
    int n = 0;
    std::set<VertexSet> c;
    std::vector<int> e;
};

inline ComplexType complex_type(const VComplex& k)
{
    ComplexType t;
    t.n = static_cast<int>(k.base.vertices().size());
    for (const auto& s : k.base.simplexes())
        t.c.insert(s);
    std::map<int, int> cls;
    for (int v = 0; v < t.n; ++v) {
        int stv = k.st_vertex[static_cast<std::size_t>(v)];
        auto it = cls.emplace(stv, static_cast<int>(cls.size())).first;
        t.e.push_back(it->second);
    }
    return t;
}

/// A bijection pi of labels with pi(C1) = C2 and E1(u,v) iff E2(pi u, pi v).
inline std::optional<std::vector<int>> type_equal(const ComplexType& a, const ComplexType& b)
{
    if (a.n > 64 || b.n > 64)
        fail(ErrorKind::ResourceLimit, "type comparison is limited to 64 vertices");
    if (a.n != b.n || a.c.size() != b.c.size())
        return std::nullopt;
    const int n = a.n;
    auto signature = [n](const ComplexType& t) {
        std::vector<std::vector<int>> sig(static_cast<std::size_t>(n));
        std::vector<int> csize(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v)
            for (int w = 0; w < n; ++w)
                if (t.e[static_cast<std::size_t>(v)] == t.e[static_cast<std::size_t>(w)])
                    ++csize[static_cast<std::size_t>(v)];
        for (const auto& s : t.c)
            for (int v : s) {
                auto& g = sig[static_cast<std::size_t>(v)];
                if (g.size() < s.size())
                    g.resize(s.size());
                ++g[s.size() - 1];
            }
        for (int v = 0; v < n; ++v)
            sig[static_cast<std::size_t>(v)].push_back(-csize[static_cast<std::size_t>(v)]);
        return sig;
    };
    auto sa = signature(a), sb = signature(b);
    std::vector<std::vector<VertexSet>> containing(static_cast<std::size_t>(n));
    for (const auto& s : a.c)
        for (int v : s)
            containing[static_cast<std::size_t>(v)].push_back(s);
    std::vector<int> pi(static_cast<std::size_t>(n), -1);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    std::function<bool(int)> assign = [&](int v) -> bool {
        if (v == n)
            return true;
        for (int w = 0; w < n; ++w) {
            if (used[static_cast<std::size_t>(w)] || sa[static_cast<std::size_t>(v)] != sb[static_cast<std::size_t>(w)])
                continue;
            bool ok = true;
            for (int u = 0; u < v && ok; ++u) {
                bool ea = a.e[static_cast<std::size_t>(u)] == a.e[static_cast<std::size_t>(v)];
                bool eb = b.e[static_cast<std::size_t>(pi[static_cast<std::size_t>(u)])] == b.e[static_cast<std::size_t>(w)];
                ok = ea == eb;
            }
            if (!ok)
                continue;
            pi[static_cast<std::size_t>(v)] = w;
            for (const auto& s : containing[static_cast<std::size_t>(v)]) {
                if (*std::max_element(s.begin(), s.end()) != v)
                    continue;
                VertexSet img;
                for (int x : s)
                    img.push_back(pi[static_cast<std::size_t>(x)]);
                std::sort(img.begin(), img.end());
                if (!b.c.count(img)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                used[static_cast<std::size_t>(w)] = true;
                if (assign(v + 1))
                    return true;
                used[static_cast<std::size_t>(w)] = false;
            }
            pi[static_cast<std::size_t>(v)] = -1;
        }
        return false;
    };
    if (!assign(0))
        return std::nullopt;
    return pi;
}

} // namespace vtri
