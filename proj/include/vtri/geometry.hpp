#pragma once

#include "lp.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace vtri {

/// Convex polytope with both descriptions. Equality rows cut out the affine
/// hull, inequality rows are normal . x <= offset, and each vertex records
/// which inequality rows it satisfies with equality.
struct Cell {
    std::size_t ambient = 0;
    std::vector<Point> eq_normals;
    std::vector<FieldElement> eq_offsets;
    std::vector<Point> normals;
    std::vector<FieldElement> offsets;
    std::vector<Point> vertices;
    std::vector<std::vector<int>> tight;

    int dim() const { return static_cast<int>(ambient) - static_cast<int>(eq_normals.size()); }

    Point interior_point() const
    {
        Point c(ambient);
        for (const auto& v : vertices)
            c = c + v;
        return FieldElement(Rational(1, static_cast<long>(vertices.size()))) * c;
    }
};

/// Rows w with w . (a - b) = 0 for all a, b in pts, as a basis.
inline std::vector<Point> affine_hull_normals(const std::vector<Point>& pts, std::size_t ambient)
{
    return nullspace(difference_vectors(pts), ambient);
}

inline Cell cell_of_simplex(const Simplex& s)
{
    Cell c;
    c.ambient = s.ambient();
    const auto& v = s.vertices;
    c.eq_normals = affine_hull_normals(v, c.ambient);
    for (const auto& w : c.eq_normals)
        c.eq_offsets.push_back(dot(w, v[0]));
    const std::size_t m = v.size() - 1;
    c.vertices = v;
    c.tight.assign(v.size(), {});
    if (m == 0)
        return c;
    for (std::size_t i = 0; i <= m; ++i) {
        std::vector<Point> facet;
        for (std::size_t j = 0; j <= m; ++j)
            if (j != i)
                facet.push_back(v[j]);
        const Point& base = facet[0];
        Point w;
        for (auto& cand : nullspace(difference_vectors(facet), c.ambient)) {
            if (!dot(cand, v[i] - base).is_zero()) {
                w = std::move(cand);
                break;
            }
        }
        FieldElement off = dot(w, base);
        if (dot(w, v[i]) > off) {
            w = FieldElement(-1) * w;
            off = -off;
        }
        int row = static_cast<int>(c.normals.size());
        c.normals.push_back(std::move(w));
        c.offsets.push_back(off);
        for (std::size_t j = 0; j <= m; ++j)
            if (j != i)
                c.tight[j].push_back(row);
    }
    return c;
}

/// Hyperplanes (normal, offset) of the equality and facet rows of a simplex.
inline std::vector<std::pair<Point, FieldElement>> supporting_hyperplanes(const Simplex& s)
{
    Cell c = cell_of_simplex(s);
    std::vector<std::pair<Point, FieldElement>> out;
    for (std::size_t i = 0; i < c.eq_normals.size(); ++i)
        out.emplace_back(c.eq_normals[i], c.eq_offsets[i]);
    for (std::size_t i = 0; i < c.normals.size(); ++i)
        out.emplace_back(c.normals[i], c.offsets[i]);
    return out;
}

namespace detail {

inline std::vector<int> intersect_sorted(const std::vector<int>& a, const std::vector<int>& b)
{
    std::vector<int> r;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

inline bool adjacent(const Cell& c, const std::vector<int>& common)
{
    Matrix rows = c.eq_normals;
    for (int r : common)
        rows.push_back(c.normals[static_cast<std::size_t>(r)]);
    return rank(std::move(rows)) + 1 == c.ambient;
}

} // namespace detail

/// Splits a cell by the hyperplane w . x = off. Returns the parts on the <=
/// and >= sides; a part is missing when the cell lies strictly on one side
/// apart from boundary contact.
inline std::pair<std::optional<Cell>, std::optional<Cell>> split_cell(const Cell& c, const Point& w,
                                                                      const FieldElement& off)
{
    std::vector<int> sgn(c.vertices.size());
    bool neg = false, pos = false;
    for (std::size_t i = 0; i < c.vertices.size(); ++i) {
        sgn[i] = compare(dot(w, c.vertices[i]), off);
        neg = neg || sgn[i] < 0;
        pos = pos || sgn[i] > 0;
    }
    if (!pos)
        return {c, std::nullopt};
    if (!neg)
        return {std::nullopt, c};
    Cell lo, hi;
    for (Cell* part : {&lo, &hi}) {
        part->ambient = c.ambient;
        part->eq_normals = c.eq_normals;
        part->eq_offsets = c.eq_offsets;
        part->normals = c.normals;
        part->offsets = c.offsets;
    }
    const int row = static_cast<int>(c.normals.size());
    lo.normals.push_back(w);
    lo.offsets.push_back(off);
    hi.normals.push_back(FieldElement(-1) * w);
    hi.offsets.push_back(-off);
    for (std::size_t i = 0; i < c.vertices.size(); ++i) {
        std::vector<int> t = c.tight[i];
        if (sgn[i] == 0)
            t.push_back(row);
        if (sgn[i] <= 0) {
            lo.vertices.push_back(c.vertices[i]);
            lo.tight.push_back(t);
        }
        if (sgn[i] >= 0) {
            hi.vertices.push_back(c.vertices[i]);
            hi.tight.push_back(t);
        }
    }
    for (std::size_t i = 0; i < c.vertices.size(); ++i) {
        if (sgn[i] >= 0)
            continue;
        for (std::size_t j = 0; j < c.vertices.size(); ++j) {
            if (sgn[j] <= 0)
                continue;
            std::vector<int> common = detail::intersect_sorted(c.tight[i], c.tight[j]);
            if (!detail::adjacent(c, common))
                continue;
            const Point& u = c.vertices[i];
            Point d = c.vertices[j] - u;
            FieldElement t = (off - dot(w, u)) / dot(w, d);
            Point p = u + t * d;
            common.push_back(row);
            lo.vertices.push_back(p);
            lo.tight.push_back(common);
            hi.vertices.push_back(p);
            hi.tight.push_back(common);
        }
    }
    return {std::move(lo), std::move(hi)};
}

/// Cuts cells by a list of hyperplanes, keeping the full-dimensional pieces.
inline std::vector<Cell> cut_cells(std::vector<Cell> cells,
                                   const std::vector<std::pair<Point, FieldElement>>& hyperplanes)
{
    for (const auto& [w, off] : hyperplanes) {
        std::vector<Cell> next;
        for (auto& c : cells) {
            auto [lo, hi] = split_cell(c, w, off);
            if (lo)
                next.push_back(std::move(*lo));
            if (hi)
                next.push_back(std::move(*hi));
        }
        cells = std::move(next);
    }
    return cells;
}

namespace detail {

struct FaceKey {
    std::vector<int> verts;
    bool operator<(const FaceKey& o) const { return verts < o.verts; }
};

class Puller {
public:
    explicit Puller(const Cell& c) : c_(c) {}

    std::vector<std::vector<int>> run()
    {
        std::vector<int> all(c_.vertices.size());
        for (std::size_t i = 0; i < all.size(); ++i)
            all[i] = static_cast<int>(i);
        return pull(all, c_.dim());
    }

private:
    std::vector<std::vector<int>> facets(const std::vector<int>& face, int d)
    {
        std::set<std::vector<int>> seen;
        std::vector<std::vector<int>> out;
        for (std::size_t r = 0; r < c_.normals.size(); ++r) {
            std::vector<int> sub;
            for (int v : face) {
                const auto& t = c_.tight[static_cast<std::size_t>(v)];
                if (std::binary_search(t.begin(), t.end(), static_cast<int>(r)))
                    sub.push_back(v);
            }
            if (sub.size() < static_cast<std::size_t>(d) || sub.size() == face.size())
                continue;
            if (!seen.insert(sub).second)
                continue;
            std::vector<Point> pts;
            for (int v : sub)
                pts.push_back(c_.vertices[static_cast<std::size_t>(v)]);
            if (affine_dimension(pts) == d - 1)
                out.push_back(std::move(sub));
        }
        return out;
    }

    std::vector<std::vector<int>> pull(const std::vector<int>& face, int d)
    {
        auto it = memo_.find(FaceKey{face});
        if (it != memo_.end())
            return it->second;
        std::vector<std::vector<int>> out;
        if (face.size() == static_cast<std::size_t>(d) + 1) {
            out.push_back(face);
        } else {
            int apex = face[0];
            for (int v : face)
                if (compare_points(c_.vertices[static_cast<std::size_t>(v)],
                                   c_.vertices[static_cast<std::size_t>(apex)]) < 0)
                    apex = v;
            for (const auto& f : facets(face, d)) {
                if (std::find(f.begin(), f.end(), apex) != f.end())
                    continue;
                for (auto s : pull(f, d - 1)) {
                    s.push_back(apex);
                    std::sort(s.begin(), s.end());
                    out.push_back(std::move(s));
                }
            }
        }
        memo_[FaceKey{face}] = out;
        return out;
    }

    const Cell& c_;
    std::map<FaceKey, std::vector<std::vector<int>>> memo_;
};

} // namespace detail

/// Pulling triangulation that always pulls the lexicographically least
/// vertex. Since the choice depends only on the points, cells sharing a face
/// induce the same triangulation on it.
inline std::vector<Simplex> pulling_triangulation(const Cell& c)
{
    std::vector<Simplex> out;
    for (const auto& s : detail::Puller(c).run()) {
        std::vector<Point> pts;
        for (int v : s)
            pts.push_back(c.vertices[static_cast<std::size_t>(v)]);
        std::sort(pts.begin(), pts.end(), PointLess());
        out.emplace_back(std::move(pts));
    }
    return out;
}

inline std::vector<Point> unique_points(std::vector<Point> pts)
{
    std::sort(pts.begin(), pts.end(), PointLess());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

/// Triangulation of the convex hull of finitely many points.
inline std::vector<Simplex> triangulate_hull(const std::vector<Point>& input)
{
    if (input.empty())
        fail(ErrorKind::EmptySet, "hull of no points");
    std::vector<Point> pts = unique_points(input);
    const std::size_t n = pts[0].size();
    if (pts.size() == 1)
        return {Simplex({pts[0]})};
    Matrix diffs = difference_vectors(pts);
    std::vector<std::size_t> coords = row_reduce(diffs);
    const int d = static_cast<int>(coords.size());
    if (static_cast<std::size_t>(d) + 1 == pts.size())
        return {Simplex(pts)};

    std::vector<Point> proj;
    for (const auto& p : pts) {
        Point q;
        for (auto c : coords)
            q.push_back(p[c]);
        proj.push_back(std::move(q));
    }
    Cell cell;
    cell.ambient = static_cast<std::size_t>(d);
    std::set<std::pair<Point, FieldElement>, bool (*)(const std::pair<Point, FieldElement>&,
                                                      const std::pair<Point, FieldElement>&)>
        rows([](const std::pair<Point, FieldElement>& a, const std::pair<Point, FieldElement>& b) {
            int c = compare_points(a.first, b.first);
            return c != 0 ? c < 0 : a.second < b.second;
        });
    std::vector<std::size_t> pick(static_cast<std::size_t>(d));
    // every d-subset of points spanning a hyperplane with all points on one side gives a facet row
    std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t k, std::size_t start) {
        if (k == pick.size()) {
            std::vector<Point> sub;
            for (auto i : pick)
                sub.push_back(proj[i]);
            auto ns = nullspace(difference_vectors(sub), cell.ambient);
            if (ns.size() != 1)
                return;
            Point w = ns[0];
            FieldElement first;
            for (const auto& x : w)
                if (!x.is_zero()) {
                    first = abs(x);
                    break;
                }
            w = (1 / first) * w;
            FieldElement off = dot(w, sub[0]);
            bool le = true, ge = true;
            for (const auto& q : proj) {
                int s = compare(dot(w, q), off);
                le = le && s <= 0;
                ge = ge && s >= 0;
            }
            if (le)
                rows.insert({w, off});
            if (ge)
                rows.insert({FieldElement(-1) * w, -off});
            return;
        }
        for (std::size_t i = start; i < proj.size(); ++i) {
            pick[k] = i;
            choose(k + 1, i + 1);
        }
    };
    choose(0, 0);
    for (const auto& [w, off] : rows) {
        cell.normals.push_back(w);
        cell.offsets.push_back(off);
    }
    std::vector<std::size_t> original;
    for (std::size_t i = 0; i < proj.size(); ++i) {
        std::vector<int> t;
        Matrix tight_rows;
        for (std::size_t r = 0; r < cell.normals.size(); ++r) {
            if (dot(cell.normals[r], proj[i]) == cell.offsets[r]) {
                t.push_back(static_cast<int>(r));
                tight_rows.push_back(cell.normals[r]);
            }
        }
        if (rank(tight_rows) != static_cast<std::size_t>(d))
            continue;
        cell.vertices.push_back(proj[i]);
        cell.tight.push_back(std::move(t));
        original.push_back(i);
    }
    std::vector<Simplex> out;
    for (const auto& s : detail::Puller(cell).run()) {
        std::vector<Point> verts;
        for (int v : s)
            verts.push_back(pts[original[static_cast<std::size_t>(v)]]);
        std::sort(verts.begin(), verts.end(), PointLess());
        out.emplace_back(std::move(verts));
    }
    (void)n;
    return out;
}

/// st of a union of V-bounded simplexes, as simplexes over Q.
inline std::vector<Simplex> st_of_simplex_union(const std::vector<Simplex>& xs)
{
    std::vector<Simplex> out;
    std::set<std::vector<Point>> seen;
    for (const auto& s : xs) {
        std::vector<Point> st;
        for (const auto& v : s.vertices)
            st.push_back(standard_part(v));
        for (auto& t : triangulate_hull(st))
            if (seen.insert(t.vertices).second)
                out.push_back(std::move(t));
    }
    return out;
}

/// Coordinatewise bounding box.
struct Box {
    Point lo, hi;

    explicit Box(const Simplex& s) : lo(s.vertices.at(0)), hi(s.vertices.at(0))
    {
        for (const auto& v : s.vertices)
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (v[i] < lo[i])
                    lo[i] = v[i];
                if (v[i] > hi[i])
                    hi[i] = v[i];
            }
    }

    bool meets(const Box& o) const
    {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (hi[i] < o.lo[i] || o.hi[i] < lo[i])
                return false;
        return true;
    }
};

/// A point of A outside the union of the Bs, if any.
inline std::optional<Point> union_misses(const Simplex& a, const std::vector<Simplex>& bs)
{
    Box box(a);
    std::vector<const Simplex*> near;
    std::vector<std::pair<Point, FieldElement>> planes;
    for (const auto& b : bs) {
        if (!box.meets(Box(b)))
            continue;
        if (std::all_of(a.vertices.begin(), a.vertices.end(), [&](const Point& v) { return contains(b, v); }))
            return std::nullopt;
        near.push_back(&b);
    }
    for (const Simplex* b : near)
        for (auto& h : supporting_hyperplanes(*b))
            planes.push_back(std::move(h));
    for (const auto& piece : cut_cells({cell_of_simplex(a)}, planes)) {
        Point x = piece.interior_point();
        bool covered = false;
        for (const Simplex* b : near)
            if (contains(*b, x)) {
                covered = true;
                break;
            }
        if (!covered)
            return x;
    }
    return std::nullopt;
}

inline bool union_contains(const std::vector<Simplex>& as, const std::vector<Simplex>& bs)
{
    for (const auto& a : as)
        if (union_misses(a, bs))
            return false;
    return true;
}

/// A point in one union and not the other, if the unions differ.
inline std::optional<Point> union_difference_witness(const std::vector<Simplex>& as,
                                                     const std::vector<Simplex>& bs)
{
    for (const auto& a : as)
        if (auto x = union_misses(a, bs))
            return x;
    for (const auto& b : bs)
        if (auto x = union_misses(b, as))
            return x;
    return std::nullopt;
}

inline bool same_union(const std::vector<Simplex>& as, const std::vector<Simplex>& bs)
{
    return !union_difference_witness(as, bs);
}

/// n! times the volume of s in R^n; zero unless s is full-dimensional.
inline FieldElement scaled_volume(const Simplex& s)
{
    const std::size_t n = s.ambient();
    if (s.vertices.size() != n + 1)
        return FieldElement();
    std::vector<HomogeneousPoint> hp;
    std::vector<const HomogeneousPoint*> rows;
    for (const auto& v : s.vertices)
        hp.push_back(homogeneous(v));
    poly::Poly weight{Rational(1)};
    for (const auto& h : hp) {
        rows.push_back(&h);
        weight = poly::mul(weight, h.back());
    }
    std::vector<std::size_t> cols(n + 1);
    for (std::size_t c = 0; c <= n; ++c)
        cols[c] = c;
    return abs(FieldElement::from_polys(detail::poly_det(rows, 0, cols), weight));
}

/// Closed full-dimensional simplex as facet hyperplanes, for fast membership.
class SimplexRegion {
public:
    explicit SimplexRegion(const Simplex& s) : box_(s)
    {
        const std::size_t n = s.ambient();
        if (s.vertices.size() != n + 1)
            fail(ErrorKind::PreconditionViolation, "region needs a full-dimensional simplex");
        std::vector<HomogeneousPoint> hp;
        for (const auto& v : s.vertices)
            hp.push_back(homogeneous(v));
        for (std::size_t r = 0; r <= n; ++r) {
            std::vector<HomogeneousPoint> facet;
            for (std::size_t q = 0; q <= n; ++q)
                if (q != r)
                    facet.push_back(hp[q]);
            auto h = hyperplane_through(facet);
            if (side_of(h, hp[r]) < 0)
                for (auto& c : h)
                    c = poly::scale(c, Rational(-1));
            planes_.push_back(std::move(h));
        }
    }

    const Box& box() const { return box_; }

    bool contains(const Point& x) const
    {
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] < box_.lo[i] || box_.hi[i] < x[i])
                return false;
        HomogeneousPoint h = homogeneous(x);
        for (const auto& p : planes_)
            if (side_of(p, h) < 0)
                return false;
        return true;
    }

    bool contains(const Simplex& t) const
    {
        return std::all_of(t.vertices.begin(), t.vertices.end(), [&](const Point& v) { return contains(v); });
    }

private:
    Box box_;
    std::vector<std::vector<poly::Poly>> planes_;
};

/// n! times the volume of the intersection of a full-dimensional simplex
/// with another simplex of R^n.
inline FieldElement overlap_volume(const Simplex& a, const SimplexRegion& ra, const Simplex& b)
{
    Box bb(b);
    if (!ra.box().meets(bb))
        return FieldElement();
    if (ra.contains(b))
        return scaled_volume(b);
    if (b.vertices.size() != b.ambient() + 1)
        return FieldElement();
    if (SimplexRegion(b).contains(a))
        return scaled_volume(a);
    FieldElement total;
    for (const auto& piece : cut_cells({cell_of_simplex(b)}, supporting_hyperplanes(a))) {
        if (piece.dim() != static_cast<int>(a.ambient()) || !ra.contains(piece.interior_point()))
            continue;
        for (const auto& t : pulling_triangulation(piece))
            total = total + scaled_volume(t);
    }
    return total;
}

inline FieldElement overlap_volume(const Simplex& a, const Simplex& b)
{
    if (a.vertices.size() != a.ambient() + 1)
        return FieldElement();
    return overlap_volume(a, SimplexRegion(a), b);
}

/// A point of A outside the union of the tiles, which must pairwise meet in
/// common faces.
inline std::optional<Point> tiling_misses(const Simplex& a, const std::vector<Simplex>& tiles)
{
    FieldElement whole = scaled_volume(a);
    if (whole.is_zero())
        return union_misses(a, tiles);
    SimplexRegion ra(a);
    FieldElement covered;
    for (const auto& t : tiles)
        covered = covered + overlap_volume(a, ra, t);
    if (covered == whole)
        return std::nullopt;
    return union_misses(a, tiles);
}

/// union_difference_witness for a tiling against arbitrary simplexes. When
/// bs_tile says the bs also pairwise meet in common faces, full-dimensional
/// bs are compared by total volume once the tiles are known to lie in them.
inline std::optional<Point> tiling_difference_witness(const std::vector<Simplex>& tiles,
                                                      const std::vector<Simplex>& bs, bool bs_tile = false)
{
    std::vector<std::optional<SimplexRegion>> regions;
    for (const auto& b : bs)
        regions.push_back(b.vertices.size() == b.ambient() + 1 ? std::optional<SimplexRegion>(SimplexRegion(b))
                                                                : std::nullopt);
    for (const auto& t : tiles) {
        bool inside = std::any_of(regions.begin(), regions.end(),
                                  [&](const auto& r) { return r && r->contains(t); });
        if (!inside)
            if (auto x = union_misses(t, bs))
                return x;
    }
    if (bs_tile && !bs.empty() &&
        std::all_of(bs.begin(), bs.end(), [](const Simplex& b) { return b.vertices.size() == b.ambient() + 1; })) {
        FieldElement inside, whole;
        for (const auto& t : tiles)
            inside = inside + scaled_volume(t);
        for (const auto& b : bs)
            whole = whole + scaled_volume(b);
        if (inside == whole)
            return std::nullopt;
    }
    for (const auto& b : bs)
        if (auto x = tiling_misses(b, tiles))
            return x;
    return std::nullopt;
}

struct NearestPoint {
    FieldElement distance;
    Point point;
};

/// Chebyshev distance from x to a simplex with a nearest point, by one LP.
inline NearestPoint sup_distance_to_set(const Point& x, const Simplex& t)
{
    require_same_dim(x, t.vertices.at(0));
    const std::size_t m = t.vertices.size(), n = x.size();
    LinearProgram lp(m + 1);
    for (std::size_t k = 0; k <= m; ++k)
        lp.nonnegative[k] = true;
    std::vector<FieldElement> sum(m + 1);
    for (std::size_t k = 0; k < m; ++k)
        sum[k] = 1;
    lp.add(sum, Relation::Equal, FieldElement(1));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<FieldElement> up(m + 1), down(m + 1);
        for (std::size_t k = 0; k < m; ++k) {
            up[k] = t.vertices[k][i];
            down[k] = -t.vertices[k][i];
        }
        up[m] = -1;
        down[m] = -1;
        lp.add(up, Relation::LessEq, x[i]);
        lp.add(down, Relation::LessEq, -x[i]);
    }
    lp.objective[m] = 1;
    lp.maximize = false;
    LPOutcome res = solve_lp(lp);
    std::vector<FieldElement> w(res.point.begin(), res.point.begin() + static_cast<std::ptrdiff_t>(m));
    return {res.point[m], affine_combination(t.vertices, w)};
}

/// One affine piece w . x - h of the distance to a simplex, with |w|_1 = 1.
struct DistancePiece {
    Point w;
    FieldElement h;

    FieldElement at(const Point& x) const { return dot(w, x) - h; }
};

/// Pieces whose maximum (together with 0) is the Chebyshev distance to T:
/// the facet normals of T plus the unit cube.
inline std::vector<DistancePiece> distance_pieces(const Simplex& t)
{
    const std::size_t n = t.ambient();
    std::vector<Point> dirs;
    for (std::size_t i = 0; i < t.vertices.size(); ++i)
        for (std::size_t j = i + 1; j < t.vertices.size(); ++j)
            dirs.push_back(t.vertices[j] - t.vertices[i]);
    for (std::size_t i = 0; i < n; ++i)
        dirs.push_back(unit_vector(n, i));

    std::set<Point, PointLess> normals;
    std::vector<std::size_t> pick(n - 1);
    std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t k, std::size_t start) {
        if (k == pick.size()) {
            Matrix m;
            for (auto i : pick)
                m.push_back(dirs[i]);
            auto ns = nullspace(m, n);
            if (ns.size() != 1)
                return;
            FieldElement norm;
            for (const auto& x : ns[0])
                norm += abs(x);
            Point w = (1 / norm) * ns[0];
            normals.insert(FieldElement(-1) * w);
            normals.insert(std::move(w));
            return;
        }
        for (std::size_t i = start; i < dirs.size(); ++i) {
            pick[k] = i;
            choose(k + 1, i + 1);
        }
    };
    choose(0, 0);

    std::vector<DistancePiece> out;
    for (const auto& w : normals) {
        FieldElement h = dot(w, t.vertices[0]);
        for (const auto& v : t.vertices)
            h = max(h, dot(w, v));
        Matrix face;
        const Point* first = nullptr;
        for (const auto& v : t.vertices) {
            if (dot(w, v) != h)
                continue;
            if (first)
                face.push_back(v - *first);
            else
                first = &v;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (w[i].is_zero())
                face.push_back(unit_vector(n, i));
        if (rank(face) + 1 == n)
            out.push_back({w, h});
    }
    return out;
}

inline FieldElement distance_by_pieces(const Point& x, const std::vector<DistancePiece>& pieces)
{
    FieldElement d;
    for (const auto& p : pieces)
        d = max(d, p.at(x));
    return d;
}

inline std::size_t& hausdorff_lp_cap()
{
    static std::size_t cap = 200000;
    return cap;
}

namespace detail {

/// max over x in S of min over j of d(x, T_j), by branching over one affine
/// piece per T_j; each branch is one LP and bounds prune the rest.
class DirectedDistance {
public:
    DirectedDistance(const Simplex& s, const std::vector<std::vector<DistancePiece>>& pieces, std::size_t& lps)
        : s_(s), pieces_(pieces), lps_(lps)
    {
    }

    FieldElement run()
    {
        for (const auto& v : s_.vertices) {
            FieldElement m = distance_by_pieces(v, pieces_[0]);
            for (std::size_t j = 1; j < pieces_.size(); ++j)
                m = min(m, distance_by_pieces(v, pieces_[j]));
            best_ = max(best_, m);
        }
        Point c = s_.barycenter();
        order_.resize(pieces_.size());
        for (std::size_t j = 0; j < order_.size(); ++j)
            order_[j] = j;
        std::vector<FieldElement> at_center(pieces_.size());
        for (std::size_t j = 0; j < pieces_.size(); ++j)
            at_center[j] = distance_by_pieces(c, pieces_[j]);
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::size_t a, std::size_t b) { return at_center[a] < at_center[b]; });
        branch(0);
        return best_;
    }

private:
    std::optional<FieldElement> bound()
    {
        if (chosen_.empty())
            return std::nullopt;
        if (++lps_ > hausdorff_lp_cap())
            fail(ErrorKind::ResourceLimit, "Hausdorff distance LP cap reached");
        const std::size_t m = s_.vertices.size(), n = s_.ambient();
        LinearProgram lp(m + 1);
        for (std::size_t k = 0; k < m; ++k)
            lp.nonnegative[k] = true;
        std::vector<FieldElement> sum(m + 1);
        for (std::size_t k = 0; k < m; ++k)
            sum[k] = 1;
        lp.add(sum, Relation::Equal, FieldElement(1));
        for (const DistancePiece* p : chosen_) {
            // r <= w . (sum lambda_k v_k) - h
            std::vector<FieldElement> row(m + 1);
            for (std::size_t k = 0; k < m; ++k)
                row[k] = -dot(p->w, s_.vertices[k]);
            row[m] = 1;
            lp.add(row, Relation::LessEq, -p->h);
        }
        lp.objective[m] = 1;
        LPOutcome res = solve_lp(lp);
        (void)n;
        if (!res.feasible())
            return FieldElement(-1);
        return res.value;
    }

    void branch(std::size_t depth)
    {
        if (!chosen_.empty()) {
            auto b = bound();
            if (b && *b <= best_)
                return;
            if (depth == order_.size()) {
                best_ = max(best_, *b);
                return;
            }
        }
        for (const auto& p : pieces_[order_[depth]]) {
            chosen_.push_back(&p);
            branch(depth + 1);
            chosen_.pop_back();
        }
    }

    const Simplex& s_;
    const std::vector<std::vector<DistancePiece>>& pieces_;
    std::size_t& lps_;
    std::vector<std::size_t> order_;
    std::vector<const DistancePiece*> chosen_;
    FieldElement best_;
};

} // namespace detail

/// sup over x in X of d(x, Y) for closed unions of simplexes.
inline FieldElement directed_hausdorff(const std::vector<Simplex>& xs, const std::vector<Simplex>& ys)
{
    if (xs.empty() || ys.empty())
        fail(ErrorKind::EmptySet, "Hausdorff distance needs nonempty sets");
    std::vector<std::vector<DistancePiece>> pieces;
    for (const auto& t : ys)
        pieces.push_back(distance_pieces(t));
    std::size_t lps = 0;
    FieldElement best;
    for (const auto& s : xs)
        best = max(best, detail::DirectedDistance(s, pieces, lps).run());
    return best;
}

inline FieldElement hausdorff_distance(const std::vector<Simplex>& xs, const std::vector<Simplex>& ys)
{
    return max(directed_hausdorff(xs, ys), directed_hausdorff(ys, xs));
}

/// Vertices of a bounded polyhedron given without strict rows.
inline std::vector<Point> polyhedron_vertices(const Polyhedron& p)
{
    if (p.empty)
        return {};
    const std::size_t n = p.dim;
    if (n == 0)
        return find_point(p) ? std::vector<Point>{Point{}} : std::vector<Point>{};
    for (std::size_t i = 0; i < n; ++i)
        for (int s : {1, -1}) {
            Point obj(n);
            obj[i] = s;
            Polyhedron closed = p;
            for (auto& r : closed.rows)
                r.strict = false;
            LPOutcome res = lp_solve(obj, closed);
            if (res.status == LPOutcome::Status::Infeasible)
                return {};
            if (res.status == LPOutcome::Status::Unbounded)
                fail(ErrorKind::PreconditionViolation, "polyhedron is unbounded");
        }
    std::set<Point, PointLess> found;
    std::vector<std::size_t> pick(n);
    std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t k, std::size_t start) {
        if (k == n) {
            Matrix a;
            Point b;
            for (auto i : pick) {
                a.push_back(p.rows[i].normal);
                b.push_back(p.rows[i].offset);
            }
            if (rank(a) != n)
                return;
            auto x = solve(a, b, n);
            if (!x)
                return;
            for (const auto& r : p.rows)
                if (dot(r.normal, *x) > r.offset)
                    return;
            found.insert(*x);
            return;
        }
        for (std::size_t i = start; i < p.rows.size(); ++i) {
            pick[k] = i;
            choose(k + 1, i + 1);
        }
    };
    choose(0, 0);
    return {found.begin(), found.end()};
}

/// Cell for a bounded polyhedron without strict rows, or nullopt when empty.
inline std::optional<Cell> cell_of_polyhedron(const Polyhedron& p)
{
    std::vector<Point> verts = polyhedron_vertices(p);
    if (verts.empty())
        return std::nullopt;
    Cell c;
    c.ambient = p.dim;
    c.eq_normals = affine_hull_normals(verts, p.dim);
    for (const auto& w : c.eq_normals)
        c.eq_offsets.push_back(dot(w, verts[0]));
    for (const auto& r : p.rows) {
        c.normals.push_back(r.normal);
        c.offsets.push_back(r.offset);
    }
    for (auto& v : verts) {
        std::vector<int> t;
        for (std::size_t r = 0; r < c.normals.size(); ++r)
            if (dot(c.normals[r], v) == c.offsets[r])
                t.push_back(static_cast<int>(r));
        c.tight.push_back(std::move(t));
        c.vertices.push_back(std::move(v));
    }
    return c;
}

/// Polyhedron cut out by a simplex: equality rows become row pairs.
inline Polyhedron polyhedron_of_simplex(const Simplex& s)
{
    Cell c = cell_of_simplex(s);
    Polyhedron p(c.ambient);
    for (std::size_t i = 0; i < c.eq_normals.size(); ++i)
        p.add_equality(c.eq_normals[i], c.eq_offsets[i]);
    for (std::size_t i = 0; i < c.normals.size(); ++i)
        p.add(c.normals[i], c.offsets[i]);
    return p;
}

} // namespace vtri
