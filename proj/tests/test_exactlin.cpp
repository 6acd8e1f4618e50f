#include <vtri/geometry.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace vtri;

namespace {

const FieldElement e = FieldElement::epsilon();

Point pt(std::initializer_list<FieldElement> xs) { return Point(xs); }

Simplex simplex(std::initializer_list<Point> vs) { return Simplex::make(std::vector<Point>(vs)); }

FieldElement q(long n, long d = 1) { return FieldElement(Rational(n, d)); }

bool raises(ErrorKind kind, const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& err) {
        return err.kind() == kind;
    }
    return false;
}

// Brute-force LP oracle in the plane: the optimum of a bounded LP is attained
// at an intersection of two constraint lines.
std::optional<FieldElement> brute_force_max(const Point& c, const Polyhedron& p)
{
    std::optional<FieldElement> best;
    for (std::size_t i = 0; i < p.rows.size(); ++i)
        for (std::size_t j = i + 1; j < p.rows.size(); ++j) {
            const auto& a = p.rows[i];
            const auto& b = p.rows[j];
            FieldElement det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
            if (det.is_zero())
                continue;
            Point x = {(a.offset * b.normal[1] - b.offset * a.normal[1]) / det,
                       (a.normal[0] * b.offset - b.normal[0] * a.offset) / det};
            if (!p.contains(x))
                continue;
            FieldElement v = dot(c, x);
            if (!best || v > *best)
                best = v;
        }
    return best;
}

} // namespace

TEST_CASE("affine independence")
{
    CHECK(affinely_independent({pt({0, 0}), pt({1, 0}), pt({0, 1})}));
    CHECK_FALSE(affinely_independent({pt({0, 0}), pt({1, 0}), pt({2, 0})}));
    CHECK(affinely_independent({pt({0, 0}), pt({1, 0}), pt({1, e})}));
    CHECK(raises(ErrorKind::DimensionMismatch, [] { affinely_independent({pt({0, 0}), pt({1})}); }));
}

TEST_CASE("barycentric coordinates")
{
    auto c = barycentric_coordinates(simplex({pt({0, 0}), pt({1, 0}), pt({0, 1})}), pt({q(1, 2), q(1, 2)}));
    REQUIRE(std::holds_alternative<std::vector<FieldElement>>(c));
    CHECK(std::get<0>(c) == std::vector<FieldElement>{0, q(1, 2), q(1, 2)});

    auto out = barycentric_coordinates(simplex({pt({0, 0}), pt({1, 0})}), pt({2, 0}));
    REQUIRE(std::holds_alternative<Outside>(out));
    CHECK(std::get<Outside>(out).negative_coordinate == 0u);
    CHECK(std::get<Outside>(out).coordinates[0] == -1);

    auto off = barycentric_coordinates(simplex({pt({0, 0}), pt({1, 0})}), pt({0, 1}));
    REQUIRE(std::holds_alternative<Outside>(off));
    CHECK_FALSE(std::get<Outside>(off).negative_coordinate);

    auto inf = barycentric_coordinates(simplex({pt({0, 0}), pt({1, 0}), pt({1, e})}), pt({1, e / 2}));
    REQUIRE(std::holds_alternative<std::vector<FieldElement>>(inf));
    CHECK(std::get<0>(inf) == std::vector<FieldElement>{0, q(1, 2), q(1, 2)});

    Simplex s = simplex({pt({0, 0, 0}), pt({1, e, 0}), pt({0, 1, 2}), pt({3, 1, e})});
    for (std::size_t i = 0; i < 4; ++i) {
        auto b = std::get<0>(barycentric_coordinates(s, s.vertices[i]));
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(b[j] == FieldElement(i == j ? 1 : 0));
    }
}

TEST_CASE("linear programs on documented instances")
{
    Polyhedron box(2);
    box.add(pt({1, 0}), 1);
    box.add(pt({0, 1}), 1);
    box.add(pt({-1, 0}), 0);
    box.add(pt({0, -1}), 0);
    LPOutcome r = lp_solve(pt({1, 1}), box);
    REQUIRE(r.optimal());
    CHECK(r.value == 2);
    CHECK(r.point == pt({1, 1}));

    Polyhedron ray(1);
    ray.add(pt({1}), 1 + e);
    ray.add(pt({-1}), 0);
    r = lp_solve(pt({1}), ray);
    REQUIRE(r.optimal());
    CHECK(r.value == 1 + e);
    CHECK(r.point == pt({1 + e}));

    Polyhedron tri = polyhedron_of_simplex(simplex({pt({0, 0}), pt({1, 0}), pt({1, e})}));
    r = lp_solve(pt({0, 1}), tri);
    REQUIRE(r.optimal());
    CHECK(r.value == e);
    CHECK(r.point == pt({1, e}));

    Polyhedron half(1);
    half.add(pt({-1}), 0);
    CHECK(lp_solve(pt({1}), half).status == LPOutcome::Status::Unbounded);

    Polyhedron none(1);
    none.add(pt({1}), -1);
    none.add(pt({-1}), 0);
    CHECK(lp_solve(pt({1}), none).status == LPOutcome::Status::Infeasible);

    Polyhedron strict(1);
    strict.add(pt({1}), 0, true);
    CHECK(raises(ErrorKind::PreconditionViolation, [&] { lp_solve(pt({1}), strict); }));
}

TEST_CASE("pivot cap raises a resource error")
{
    std::size_t saved = lp_pivot_cap();
    lp_pivot_cap() = 1;
    Polyhedron box(2);
    box.add(pt({1, 0}), 1);
    box.add(pt({0, 1}), 1);
    box.add(pt({-1, 0}), 0);
    box.add(pt({0, -1}), 0);
    CHECK(raises(ErrorKind::ResourceLimit, [&] { lp_solve(pt({1, 1}), box); }));
    lp_pivot_cap() = saved;
}

TEST_CASE("random planar LPs agree with vertex enumeration")
{
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> coef(-5, 5);
    int checked = 0;
    for (int it = 0; it < 300; ++it) {
        Polyhedron p(2);
        // a bounding box keeps every instance bounded
        p.add(pt({1, 0}), 10);
        p.add(pt({-1, 0}), 10);
        p.add(pt({0, 1}), 10);
        p.add(pt({0, -1}), 10);
        for (int k = 0; k < 4; ++k)
            p.add(pt({coef(rng) + coef(rng) * e, FieldElement(coef(rng))}), coef(rng) + coef(rng) * e);
        Point c = {FieldElement(coef(rng)) + coef(rng) * e, FieldElement(coef(rng))};
        LPOutcome r = lp_solve(c, p);
        auto oracle = brute_force_max(c, p);
        if (!oracle) {
            CHECK(r.status == LPOutcome::Status::Infeasible);
            continue;
        }
        REQUIRE(r.optimal());
        CHECK(r.value == *oracle);
        CHECK(p.contains(r.point));
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("closure of polyhedra with strict rows")
{
    Polyhedron neg(1);
    neg.add(pt({1}), 0, true);
    Polyhedron c = closure(neg);
    CHECK_FALSE(c.empty);
    CHECK_FALSE(c.rows[0].strict);

    Polyhedron both(1);
    both.add(pt({1}), 0, true);
    both.add(pt({-1}), 0, true);
    CHECK(closure(both).empty);

    // 0 < t <= 1, t <= x <= 1 in coordinates (t, x)
    Polyhedron fam(2);
    fam.add(pt({-1, 0}), 0, true);
    fam.add(pt({1, 0}), 1);
    fam.add(pt({1, -1}), 0);
    fam.add(pt({0, 1}), 1);
    Polyhedron cf = closure(fam);
    CHECK_FALSE(cf.empty);
    CHECK(cf.contains(pt({0, 0})));
    CHECK_FALSE(fam.contains(pt({0, 0})));
    CHECK(fam.contains(pt({q(1, 2), q(3, 4)})));

    // idempotent, and an infinitesimal gap is still nonempty
    Polyhedron cc = closure(cf);
    CHECK(cc.rows.size() == cf.rows.size());
    Polyhedron gap(1);
    gap.add(pt({-1}), 0, true);
    gap.add(pt({1}), e * e, true);
    CHECK_FALSE(closure(gap).empty);
}

TEST_CASE("sup distances")
{
    CHECK(sup_distance(pt({0, 0}), pt({1, e})) == 1);
    CHECK(sup_distance_to_set(pt({0}), simplex({pt({1}), pt({2})})).distance == 1);
    CHECK(sup_distance_to_set(pt({0, 0}), simplex({pt({1, 0}), pt({1, 1})})).distance == 1);
    NearestPoint np = sup_distance_to_set(pt({0, 3}), simplex({pt({1, 0}), pt({1, 1})}));
    CHECK(np.distance == 2);
    CHECK(np.point == pt({1, 1}));
    CHECK(raises(ErrorKind::DimensionMismatch, [] { sup_distance(pt({0}), pt({0, 1})); }));
}

TEST_CASE("distance pieces agree with the distance LP")
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> coef(-4, 4);
    auto rnd = [&] { return FieldElement(coef(rng)) + coef(rng) * e; };
    for (int it = 0; it < 60; ++it) {
        std::size_t n = 1 + static_cast<std::size_t>(it % 3);
        std::size_t m = static_cast<std::size_t>(coef(rng) + 4) % (n + 1);
        std::vector<Point> vs;
        do {
            vs.clear();
            for (std::size_t k = 0; k <= m; ++k) {
                Point v(n);
                for (auto& x : v)
                    x = rnd();
                vs.push_back(v);
            }
        } while (!affinely_independent(vs));
        Simplex t(vs);
        auto pieces = distance_pieces(t);
        for (int k = 0; k < 5; ++k) {
            Point x(n);
            for (auto& c : x)
                c = rnd();
            CHECK(distance_by_pieces(x, pieces) == sup_distance_to_set(x, t).distance);
        }
    }
}

TEST_CASE("Hausdorff distance on documented instances")
{
    CHECK(hausdorff_distance({simplex({pt({0})})}, {simplex({pt({1})})}) == 1);
    CHECK(hausdorff_distance({simplex({pt({0}), pt({1})})}, {simplex({pt({0}), pt({1 + e})})}) == e);
    std::vector<Simplex> sq = {simplex({pt({0, 0}), pt({1, 0}), pt({1, 1})}),
                               simplex({pt({0, 0}), pt({0, 1}), pt({1, 1})})};
    CHECK(hausdorff_distance(sq, sq) == 0);
    // a segment through the square against its boundary: the centre is 1/2 away
    std::vector<Simplex> rim = {simplex({pt({0, 0}), pt({1, 0})}), simplex({pt({1, 0}), pt({1, 1})}),
                                simplex({pt({1, 1}), pt({0, 1})}), simplex({pt({0, 1}), pt({0, 0})})};
    CHECK(directed_hausdorff(sq, rim) == q(1, 2));
    CHECK(directed_hausdorff(rim, sq) == 0);
    CHECK(raises(ErrorKind::EmptySet, [&] { hausdorff_distance({}, sq); }));
}

namespace {

// Oracle for unions of intervals on the line: d(x, Y) is piecewise linear with
// breakpoints at the endpoints of Y and midpoints of the gaps of Y.
FieldElement interval_directed(const std::vector<std::pair<FieldElement, FieldElement>>& xs,
                               const std::vector<std::pair<FieldElement, FieldElement>>& ys)
{
    auto dist = [&](const FieldElement& x) {
        FieldElement best = -1;
        for (auto [a, b] : ys) {
            FieldElement d = x < a ? a - x : x > b ? x - b : FieldElement(0);
            if (best < 0 || d < best)
                best = d;
        }
        return best;
    };
    std::vector<FieldElement> cand;
    for (auto [a, b] : ys)
        for (auto [c, d] : ys) {
            cand.push_back(b);
            cand.push_back((b + c) / 2);
        }
    FieldElement best;
    for (auto [a, b] : xs) {
        best = max(best, dist(a));
        best = max(best, dist(b));
        for (const auto& c : cand)
            if (a <= c && c <= b)
                best = max(best, dist(c));
    }
    return best;
}

} // namespace

TEST_CASE("Hausdorff distance on the line matches the interval oracle")
{
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> coef(-6, 6);
    auto rnd_union = [&] {
        std::vector<std::pair<FieldElement, FieldElement>> iv;
        int k = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < k; ++i) {
            FieldElement a = FieldElement(coef(rng)) + coef(rng) * e;
            FieldElement b = a + FieldElement(static_cast<long>(rng() % 3)) + static_cast<long>(rng() % 2) * e;
            iv.emplace_back(a, b);
        }
        return iv;
    };
    auto to_simplexes = [](const std::vector<std::pair<FieldElement, FieldElement>>& iv) {
        std::vector<Simplex> out;
        for (auto [a, b] : iv)
            out.push_back(a == b ? Simplex({Point{a}}) : Simplex({Point{a}, Point{b}}));
        return out;
    };
    for (int it = 0; it < 80; ++it) {
        auto x = rnd_union(), y = rnd_union();
        FieldElement expect = max(interval_directed(x, y), interval_directed(y, x));
        CHECK(hausdorff_distance(to_simplexes(x), to_simplexes(y)) == expect);
    }
}

TEST_CASE("Hausdorff distance is a metric on random planar unions")
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> coef(0, 4);
    auto rnd_set = [&] {
        std::vector<Simplex> out;
        int k = 1 + static_cast<int>(rng() % 2);
        while (static_cast<int>(out.size()) < k) {
            std::size_t m = rng() % 3;
            std::vector<Point> vs;
            for (std::size_t i = 0; i <= m; ++i)
                vs.push_back(pt({FieldElement(coef(rng)) + coef(rng) * e, FieldElement(coef(rng))}));
            if (affinely_independent(vs))
                out.emplace_back(vs);
        }
        return out;
    };
    for (int it = 0; it < 25; ++it) {
        auto x = rnd_set(), y = rnd_set(), z = rnd_set();
        FieldElement xy = hausdorff_distance(x, y), yz = hausdorff_distance(y, z), xz = hausdorff_distance(x, z);
        CHECK(xy == hausdorff_distance(y, x));
        CHECK(xz <= xy + yz);
        CHECK(hausdorff_distance(x, x) == 0);
        CHECK((xy == 0) == same_union(x, y));
    }
}

TEST_CASE("standard part of simplex unions")
{
    auto flat = st_of_simplex_union({simplex({pt({0, 0}), pt({1, 0}), pt({1, e})})});
    REQUIRE(flat.size() == 1);
    CHECK(flat[0].vertices == std::vector<Point>{pt({0, 0}), pt({1, 0})});
    Simplex rat = simplex({pt({0, 0}), pt({1, 0}), pt({0, 1})});
    auto same = st_of_simplex_union({rat});
    REQUIRE(same.size() == 1);
    CHECK(same_union(same, {rat}));
    auto dot_ = st_of_simplex_union({simplex({pt({0, 0}), pt({e, 0}), pt({0, e})})});
    REQUIRE(dot_.size() == 1);
    CHECK(dot_[0].vertices == std::vector<Point>{pt({0, 0})});
    CHECK(raises(ErrorKind::NotFinite, [] { st_of_simplex_union({simplex({pt({0}), pt({1 / e})})}); }));
}

TEST_CASE("hull triangulation covers the hull exactly")
{
    // a square with its centre: centre is not a vertex
    auto tri = triangulate_hull({pt({0, 0}), pt({2, 0}), pt({0, 2}), pt({2, 2}), pt({1, 1})});
    CHECK(tri.size() == 2);
    std::vector<Simplex> sq = {simplex({pt({0, 0}), pt({2, 0}), pt({2, 2})}),
                               simplex({pt({0, 0}), pt({0, 2}), pt({2, 2})})};
    CHECK(same_union(tri, sq));
    // an octahedron in R^3 needs 4 tetrahedra when pulled from one vertex
    auto oct = triangulate_hull({pt({1, 0, 0}), pt({-1, 0, 0}), pt({0, 1, 0}), pt({0, -1, 0}), pt({0, 0, 1}),
                                 pt({0, 0, -1})});
    CHECK(oct.size() == 4);
    // a planar quadrilateral in R^3
    auto quad = triangulate_hull({pt({0, 0, 0}), pt({1, 0, 1}), pt({0, 1, 1}), pt({1, 1, 2})});
    CHECK(quad.size() == 2);
    for (const auto& s : quad)
        CHECK(s.dim() == 2);
}

TEST_CASE("union containment finds uncovered points")
{
    Simplex big = simplex({pt({0, 0}), pt({2, 0}), pt({0, 2})});
    std::vector<Simplex> halves = {simplex({pt({0, 0}), pt({1, 1}), pt({0, 2})}),
                                   simplex({pt({0, 0}), pt({2, 0}), pt({1, 1})})};
    CHECK(same_union({big}, halves));
    auto w = union_misses(big, {halves[0]});
    REQUIRE(w);
    CHECK(contains(big, *w));
    CHECK_FALSE(contains(halves[0], *w));
    // an infinitesimally thinner triangle misses a sliver
    auto thin = union_misses(big, {simplex({pt({0, 0}), pt({2 - e, 0}), pt({0, 2})})});
    REQUIRE(thin);
    CHECK(contains(big, *thin));
}

TEST_CASE("cell splitting keeps both sides")
{
    Cell c = cell_of_simplex(simplex({pt({0, 0}), pt({2, 0}), pt({0, 2})}));
    auto [lo, hi] = split_cell(c, pt({1, 0}), 1);
    REQUIRE(lo);
    REQUIRE(hi);
    CHECK(lo->vertices.size() == 4);
    CHECK(hi->vertices.size() == 3);
    auto pieces = pulling_triangulation(*lo);
    CHECK(pieces.size() == 2);
    std::vector<Simplex> all = pieces;
    for (auto& s : pulling_triangulation(*hi))
        all.push_back(s);
    CHECK(same_union(all, {Simplex(c.vertices)}));
    auto [none, whole] = split_cell(c, pt({1, 0}), 0);
    CHECK_FALSE(none);
    CHECK(whole);
}

TEST_CASE("vertices of polyhedra")
{
    Polyhedron p(2);
    p.add(pt({-1, 0}), 0);
    p.add(pt({0, -1}), 0);
    p.add(pt({1, 1}), 1);
    auto v = polyhedron_vertices(p);
    CHECK(v.size() == 3);
    Polyhedron un(1);
    un.add(pt({-1}), 0);
    CHECK(raises(ErrorKind::PreconditionViolation, [&] { polyhedron_vertices(un); }));
}

TEST_CASE("orientation matches the sign of the determinant")
{
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> coef(-3, 3);
    auto value = [&] {
        FieldElement x(coef(rng));
        x = x + FieldElement(coef(rng)) * e;
        if (rng() % 4 == 0)
            x = x / (FieldElement(1) + FieldElement(coef(rng)) * e);
        return x;
    };
    auto det = [](std::vector<Point> m) {
        FieldElement d(1);
        const std::size_t n = m.size();
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t p = c;
            while (p < n && m[p][c].is_zero())
                ++p;
            if (p == n)
                return FieldElement();
            if (p != c) {
                std::swap(m[p], m[c]);
                d = -d;
            }
            d = d * m[c][c];
            for (std::size_t r = c + 1; r < n; ++r) {
                FieldElement f = m[r][c] / m[c][c];
                for (std::size_t k = c; k < n; ++k)
                    m[r][k] = m[r][k] - f * m[c][k];
            }
        }
        return d;
    };
    for (std::size_t n : {1u, 2u, 3u})
        for (int trial = 0; trial < 60; ++trial) {
            std::vector<Point> pts;
            for (std::size_t i = 0; i < n; ++i) {
                Point p(n);
                for (auto& x : p)
                    x = value();
                pts.push_back(p);
            }
            Point q(n);
            for (auto& x : q)
                x = value();
            // sometimes put q on the plane
            if (trial % 5 == 0 && n > 1)
                q = pts[0] + FieldElement(2) * (pts[1] - pts[0]);
            std::vector<Point> rows;
            for (std::size_t i = 1; i < n; ++i)
                rows.push_back(pts[i] - pts[0]);
            rows.push_back(q - pts[0]);
            CHECK(orientation(pts, q) == det(rows).sign());
        }
}

TEST_CASE("volumes and tilings")
{
    Simplex tri = simplex({pt({0, 0}), pt({1, 0}), pt({0, 1})});
    CHECK(scaled_volume(tri) == q(1));
    CHECK(scaled_volume(simplex({pt({0, 0}), pt({e, 0}), pt({0, 2})})) == q(2) * e);
    CHECK(scaled_volume(simplex({pt({0, 0}), pt({1, 1})})).is_zero());
    Simplex shifted = simplex({pt({q(1, 2), 0}), pt({q(3, 2), 0}), pt({q(1, 2), 1})});
    // the overlap is the triangle (1/2,0), (1,0), (1/2,1/2)
    CHECK(overlap_volume(tri, shifted) == q(1, 4));
    CHECK(overlap_volume(tri, simplex({pt({5, 5}), pt({6, 5}), pt({5, 6})})).is_zero());

    Simplex big = simplex({pt({0, 0}), pt({2, 0}), pt({0, 2})});
    std::vector<Simplex> halves = {simplex({pt({0, 0}), pt({1, 1}), pt({0, 2})}),
                                   simplex({pt({0, 0}), pt({2, 0}), pt({1, 1})})};
    CHECK_FALSE(tiling_difference_witness(halves, {big}));
    CHECK_FALSE(tiling_difference_witness(halves, {big}, true));
    auto w = tiling_difference_witness({halves[0]}, {big}, true);
    REQUIRE(w);
    CHECK(contains(big, *w));
    CHECK_FALSE(contains(halves[0], *w));
    // tiles reaching outside are caught before the volume comparison
    auto out = tiling_difference_witness({big}, {halves[0]}, true);
    REQUIRE(out);
    CHECK_FALSE(contains(halves[0], *out));
}
