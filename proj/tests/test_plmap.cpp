#include <vtri/plmap.hpp>

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

PLMap real_map(const std::vector<Simplex>& ss, const std::function<FieldElement(const Point&)>& f)
{
    return plmap_from_function(Complex::from_simplexes(ss), 1, [&](const Point& x) { return Point{f(x)}; });
}

Multifunction multifunction(const Complex& base, const std::vector<std::function<FieldElement(const Point&)>>& fs)
{
    Multifunction m{base, {}};
    for (const auto& f : fs)
        m.members.push_back(plmap_from_function(base, 1, [&](const Point& x) { return Point{f(x)}; }));
    return m;
}

} // namespace

TEST_CASE("evaluation interpolates vertex images", "[plmap]")
{
    Simplex s = simplex({pt({0}), pt({1})});
    PLMap f(Complex::from_simplexes({s}), {pt({0}), pt({2})}, 1);
    CHECK(f.evaluate(pt({q(1, 2)})) == pt({1}));
    PLMap g(Complex::from_simplexes({s}), {pt({0}), pt({e})}, 1);
    CHECK(g.evaluate(pt({q(1, 2)})) == pt({e / 2}));
    CHECK(raises(ErrorKind::OutsideDomain, [&] { f.evaluate(pt({2})); }));
    CHECK(raises(ErrorKind::DimensionMismatch, [&] { PLMap(Complex::from_simplexes({s}), {pt({0})}, 1); }));

    auto graph = f.graph();
    REQUIRE(graph.size() == 1);
    CHECK(graph[0].vertices == std::vector<Point>{pt({0, 0}), pt({1, 2})});
}

TEST_CASE("composition, restriction and inversion", "[plmap]")
{
    Simplex tri = simplex({pt({0, 0}), pt({1, 0}), pt({0, 1})});
    Complex k = Complex::from_simplexes({tri});
    PLMap swap = plmap_from_function(k, 2, [](const Point& x) { return pt({x[1], x[0]}); });
    PLMap back = invert(swap);
    PLMap round = compose(back, swap);
    for (const auto& v : k.vertices())
        CHECK(round.evaluate(v) == v);
    CHECK(round.evaluate(pt({q(1, 3), q(1, 5)})) == pt({q(1, 3), q(1, 5)}));

    Complex edge = Complex::from_simplexes({simplex({pt({0, 0}), pt({1, 0})})});
    PLMap r = restrict(swap, edge);
    CHECK(r.evaluate(pt({q(1, 2), 0})) == pt({0, q(1, 2)}));
    CHECK(raises(ErrorKind::PreconditionViolation,
                 [&] { restrict(swap, Complex::from_simplexes({simplex({pt({0, 0}), pt({2, 0})})})); }));

    PLMap fold = plmap_from_function(k, 1, [](const Point& x) { return pt({x[0] + x[1]}); });
    try {
        invert(fold);
        FAIL("folding map inverted");
    } catch (const NotInvertible& err) {
        CHECK(err.first != err.second);
        CHECK(fold.evaluate(err.first) == fold.evaluate(err.second));
    }

    Complex two = Complex::from_simplexes({simplex({pt({0}), pt({1})}), simplex({pt({1}), pt({2})})});
    PLMap overlap(two, {pt({0}), pt({2}), pt({1})}, 1);
    try {
        invert(overlap);
        FAIL("overlapping map inverted");
    } catch (const NotInvertible& err) {
        CHECK(overlap.evaluate(err.first) == overlap.evaluate(err.second));
        CHECK(err.first != err.second);
    }
}

TEST_CASE("induced maps on standard parts", "[plmap]")
{
    Simplex thin = simplex({pt({0}), pt({e})});
    PLMap jump(Complex::from_simplexes({thin}), {pt({0}), pt({1})}, 1);
    CHECK(raises(ErrorKind::NotInduced, [&] { induced_map(jump); }));
    auto w = inducement_failure(jump);
    REQUIRE(w);
    CHECK(standard_part(w->first) == standard_part(w->second));
    CHECK(standard_part(jump.evaluate(w->first)) != standard_part(jump.evaluate(w->second)));

    Simplex tri = simplex({pt({0, 0}), pt({1, 0}), pt({1, e})});
    PLMap f(Complex::from_simplexes({tri}), {pt({0}), pt({5}), pt({5 + e})}, 1);
    PLMap g = induced_map(f);
    CHECK(g.evaluate(pt({0, 0})) == pt({0}));
    CHECK(g.evaluate(pt({1, 0})) == pt({5}));
    CHECK(g.evaluate(pt({q(1, 2), 0})) == pt({q(5, 2)}));

    PLMap bad(Complex::from_simplexes({tri}), {pt({0}), pt({5}), pt({6})}, 1);
    try {
        induced_map(bad);
        FAIL("induced map accepted");
    } catch (const NotInduced& err) {
        CHECK(standard_part(err.first) == standard_part(err.second));
    }

    // the vertex criterion alone misses this: st-degenerate triangle whose
    // interior images separate over one standard point
    Simplex flat = simplex({pt({0, 0}), pt({2, 0}), pt({1, e})});
    PLMap peak = real_map({flat}, [](const Point& x) { return x[1].is_zero() ? FieldElement() : FieldElement(1); });
    REQUIRE(raises(ErrorKind::NotVComplex, [&] { make_vcomplex(peak.domain); }));
    auto pw = inducement_failure(peak);
    REQUIRE(pw);
    CHECK(standard_part(pw->first) == standard_part(pw->second));
    CHECK(standard_part(peak.evaluate(pw->first)) != standard_part(peak.evaluate(pw->second)));

    PLMap tilt = real_map({flat}, [](const Point& x) { return x[0] + x[1]; });
    CHECK(induces(tilt));
}

TEST_CASE("inducement agrees with affine oracles on random thin triangles", "[plmap]")
{
    std::mt19937 rng(11);
    std::uniform_int_distribution<long> c(-4, 4);
    for (int it = 0; it < 40; ++it) {
        Point a = pt({q(c(rng)), q(c(rng))});
        Point b = a + pt({q(1 + (it % 3)), q(c(rng))});
        Point m = FieldElement(q(1, 2)) * (a + b);
        Point d = m + pt({e * q(c(rng)), e * q(1 + (it % 2))});
        Simplex s = simplex({a, b, d});
        FieldElement p = q(c(rng)), r = q(c(rng)), t = q(c(rng));
        // standard-affine images plus infinitesimal noise always induce
        PLMap good = real_map({s}, [&](const Point& x) {
            FieldElement noise = x == d ? e * q(c(rng)) : FieldElement();
            return p * x[0] + r * x[1] + t + noise;
        });
        CHECK(induces(good));
        // a finite bump at the apex separates two points over its shadow
        PLMap bump = real_map({s}, [&](const Point& x) { return x == d ? FieldElement(1) : FieldElement(); });
        CHECK_FALSE(induces(bump));
    }
}

TEST_CASE("canonical V-homeomorphism between equal types", "[plmap]")
{
    VComplex k = make_vcomplex(Complex::from_simplexes({simplex({pt({0}), pt({e})}), simplex({pt({e}), pt({1})})}));
    VComplex k2 = make_vcomplex(Complex::from_simplexes({simplex({pt({0}), pt({1 - e})}), simplex({pt({1 - e}), pt({1})})}));
    auto pi = type_equal(complex_type(k), complex_type(k2));
    REQUIRE(pi);
    PLMap phi = canonical_v_homeomorphism(k, k2, *pi);
    CHECK(phi.evaluate(pt({0})) == pt({1}));
    CHECK(phi.evaluate(pt({1})) == pt({0}));
    CHECK(raises(ErrorKind::PreconditionViolation, [&] { canonical_v_homeomorphism(k, k2, {0, 1, 2}); }));
}

TEST_CASE("multifunctions: trichotomy and successors", "[plmap]")
{
    Complex seg = Complex::from_simplexes({simplex({pt({0}), pt({1})})});
    auto zero = [](const Point&) { return FieldElement(); };
    Multifunction m = validate_multifunction(multifunction(seg, {zero, [](const Point&) { return FieldElement(1); }}));
    CHECK(successor(m, {0, 1}, 0) == std::optional<std::size_t>(1));
    CHECK(!successor(m, {0, 1}, 1));

    Multifunction cross = multifunction(seg, {[](const Point& x) { return x[0]; }, [](const Point& x) { return 1 - x[0]; }});
    try {
        validate_multifunction(cross);
        FAIL("crossing members accepted");
    } catch (const TrichotomyViolation& err) {
        CHECK(err.first == 0);
        CHECK(err.second == 1);
    }

    Multifunction tiny = validate_multifunction(multifunction(seg, {zero, [](const Point&) { return e; }}));
    CHECK(successor(tiny, {0, 1}, 0) == std::optional<std::size_t>(1));
    VComplex vs = make_vcomplex(seg);
    CHECK(induced_map(tiny.members[0], vs).images == induced_map(tiny.members[1], vs).images);

    // touching at a vertex is fine: zero there, positive inside
    Multifunction touch = validate_multifunction(multifunction(seg, {zero, [](const Point& x) { return x[0]; }}));
    CHECK(successor(touch, {1}, 0) == std::optional<std::size_t>(1));
    CHECK(!successor(touch, {0}, 0));

    Multifunction coarse = multifunction(seg, {zero});
    coarse.members[0] = real_map({simplex({pt({0}), pt({q(1, 2)})}), simplex({pt({q(1, 2)}), pt({1})})}, zero);
    coarse.members.push_back(
        real_map({simplex({pt({0}), pt({q(1, 2)})}), simplex({pt({q(1, 2)}), pt({1})})},
                 [](const Point& x) { return x[0] == q(1, 2) ? FieldElement(-1) : FieldElement(1); }));
    CHECK(raises(ErrorKind::TrichotomyViolation, [&] { validate_multifunction(coarse); }));
}

TEST_CASE("region complexes are graphs and bands", "[plmap]")
{
    Complex seg = Complex::from_simplexes({simplex({pt({0}), pt({1})})});
    Multifunction m = validate_multifunction(
        multifunction(seg, {[](const Point&) { return FieldElement(); }, [](const Point& x) { return x[0] + 1; }}));
    RegionComplexes r = region_complexes(m);
    CHECK(r.graphs.size() == 2);
    std::vector<Simplex> trapezoid = triangulate_hull({pt({0, 0}), pt({1, 0}), pt({0, 1}), pt({1, 2})});
    CHECK(same_union(r.bands, trapezoid));
    validate_complex(r.region());
}

TEST_CASE("extension over a subcomplex", "[plmap]")
{
    VComplex k = make_vcomplex(Complex::from_simplexes({simplex({pt({0}), pt({1})})}));
    Complex l = Complex::from_simplexes({Simplex({pt({0})})});
    PLMap f(l, {pt({7})}, 1);
    PLMap g = extend_over_subcomplex(k, l, f);
    CHECK(g.evaluate(pt({1})) == pt({0}));
    CHECK(g.evaluate(pt({q(1, 2)})) == pt({q(7, 2)}));

    VComplex near = make_vcomplex(Complex::from_simplexes({simplex({pt({0}), pt({e})})}));
    PLMap f3(l, {pt({3})}, 1);
    PLMap h = extend_over_subcomplex(near, l, f3);
    CHECK(h.evaluate(pt({e})) == pt({3}));
    CHECK(induces(h, true));

    VComplex square = make_vcomplex(Complex::from_simplexes(
        {simplex({pt({0, 0}), pt({1, 0}), pt({0, e})}), simplex({pt({1, 0}), pt({1, e}), pt({0, e})})}));
    Complex bottom = Complex::from_simplexes({simplex({pt({0, 0}), pt({1, 0})})});
    PLMap fb = plmap_from_function(bottom, 1, [](const Point& x) { return pt({2 * x[0]}); });
    PLMap sq = extend_over_subcomplex(square, bottom, fb);
    CHECK(sq.evaluate(pt({0, e})) == pt({0}));
    CHECK(standard_part(sq.evaluate(pt({1, e}))) == pt({2}));
    CHECK(induced_map(sq, square).evaluate(pt({q(1, 2), 0})) == pt({1}));
    Complex off = Complex::from_simplexes({Simplex({pt({5, 5})})});
    CHECK(raises(ErrorKind::PreconditionViolation, [&] { extend_over_subcomplex(square, off, PLMap(off, {pt({1})}, 1)); }));
}

TEST_CASE("extension from the boundary along chords", "[plmap]")
{
    Simplex seg = simplex({pt({0}), pt({1})});
    PLMap ends(Complex::from_simplexes({Simplex({pt({0})}), Simplex({pt({1})})}), {pt({2}), pt({4})}, 1);
    PLMap g1 = extend_from_boundary(seg, ends, pt({1}));
    CHECK(g1.evaluate(pt({q(1, 4)})) == pt({q(5, 2)}));
    CHECK(raises(ErrorKind::BadDirection, [&] { extend_from_boundary(seg, ends, pt({0})); }));

    Simplex tri = simplex({pt({0, 0}), pt({2, 0}), pt({1, 2})});
    CHECK(raises(ErrorKind::BadDirection, [&] { check_direction(tri, pt({1, 0})); }));
    CHECK(raises(ErrorKind::BadDirection, [&] { check_direction(tri, pt({1, -2})); }));
    check_direction(tri, pt({1, 1}));

    // zero on two edges, a tent on the third: values along vertical chords
    std::vector<Simplex> boundary = {simplex({pt({0, 0}), pt({1, 0})}), simplex({pt({1, 0}), pt({2, 0})}),
                                     simplex({pt({2, 0}), pt({1, 2})}), simplex({pt({1, 2}), pt({0, 0})})};
    PLMap tent = real_map(boundary, [](const Point& x) { return x == pt({1, 0}) ? FieldElement(1) : FieldElement(); });
    Point u = pt({0, 1});
    PLMap g = extend_from_boundary(tri, tent, u);
    CHECK(same_union(g.domain.maximal_simplexes(), {tri}));
    validate_complex(g.domain.maximal_simplexes());
    for (const auto& b : boundary)
        for (const auto& v : b.vertices)
            CHECK(g.evaluate(v) == tent.evaluate(v));
    CHECK(g.evaluate(pt({1, q(1, 2)})) == pt({q(3, 4)}));
    CHECK(g.evaluate(pt({q(1, 2), q(1, 2)})) == pt({q(1, 4)}));
    CHECK(chord_endpoint(tri, u, pt({1, 0})) == pt({1, 2}));

    // affine boundary data on a simplex listed out of coordinate order
    Simplex unsorted = simplex({pt({0, 0}), pt({1, 0}), pt({0, 1})});
    std::vector<Simplex> edges = {simplex({pt({0, 0}), pt({1, 0})}), simplex({pt({1, 0}), pt({0, 1})}),
                                  simplex({pt({0, 1}), pt({0, 0})})};
    PLMap lin = real_map(edges, [](const Point& x) { return x[0] + e * x[1]; });
    PLMap gl = extend_from_boundary(unsorted, lin, pt({1, 1}));
    CHECK(gl.domain.maximal_simplexes().size() == 1);
    CHECK(gl.evaluate(pt({1, 0})) == pt({1}));
    CHECK(gl.evaluate(pt({0, 1})) == pt({e}));
    CHECK(gl.evaluate(pt({q(1, 4), q(1, 2)})) == pt({q(1, 4) + e / 2}));

    // degenerate simplexes need infinitesimal directions
    Simplex flat = simplex({pt({0, 0}), pt({2, 0}), pt({1, e})});
    CHECK(raises(ErrorKind::BadDirection, [&] { check_direction(flat, pt({0, 1})); }));
    Point du = admissible_direction(flat);
    check_direction(flat, du);
    CHECK(is_zero_vector(standard_part(du)));
}

TEST_CASE("boundary extension matches chord interpolation on random data", "[plmap]")
{
    std::mt19937 rng(5);
    std::uniform_int_distribution<long> c(-3, 3);
    for (int it = 0; it < 12; ++it) {
        Simplex tri = simplex({pt({0, 0}), pt({q(3 + it % 2), q(c(rng))}), pt({q(c(rng) % 2), q(3)})});
        std::vector<Simplex> boundary;
        std::map<Point, FieldElement, PointLess> val;
        for (std::size_t i = 0; i < 3; ++i) {
            const Point& a = tri.vertices[i];
            const Point& b = tri.vertices[(i + 1) % 3];
            Point m = FieldElement(q(1 + it % 3, 4)) * (b - a) + a;
            boundary.push_back(simplex({a, m}));
            boundary.push_back(simplex({m, b}));
            for (const Point& p : {a, m})
                if (!val.count(p))
                    val[p] = q(c(rng)) + (it % 2 ? e * q(c(rng)) : FieldElement());
        }
        PLMap f = real_map(boundary, [&](const Point& x) { return val.at(x); });
        Point u = admissible_direction(tri);
        PLMap g = extend_from_boundary(tri, f, u);
        CHECK(same_union(g.domain.maximal_simplexes(), {tri}));
        for (const auto& [p, v] : val)
            CHECK(g.evaluate(p) == pt({v}));
        // g is affine on each chord between its boundary values
        for (const auto& x : {tri.barycenter(), FieldElement(q(1, 3)) * (tri.vertices[1] + tri.vertices[2]) +
                                                    FieldElement(q(1, 3)) * tri.vertices[0]}) {
            Point hi = chord_endpoint(tri, u, x);
            Point lo = chord_endpoint(tri, FieldElement(-1) * u, x);
            FieldElement t = (x - lo)[1].is_zero() ? (x - lo)[0] / (hi - lo)[0] : (x - lo)[1] / (hi - lo)[1];
            FieldElement want = (1 - t) * f.evaluate(lo)[0] + t * f.evaluate(hi)[0];
            CHECK(g.evaluate(x) == pt({want}));
        }
    }
}

TEST_CASE("good directions", "[plmap]")
{
    Simplex horizontal = simplex({pt({0, 0}), pt({1, 0})});
    CHECK(is_good_direction(pt({0, 1}), {horizontal}));
    CHECK_FALSE(is_good_direction(pt({1, 0}), {horizontal}));
    Simplex graph = simplex({pt({0, 0}), pt({1, e})});
    CHECK_FALSE(is_good_direction(pt({1, e}), {graph}));
    CHECK(v_good_direction({graph}, 2) == pt({0, 1}));

    Simplex vertical = simplex({pt({0, 0}), pt({0, 1})});
    Point u = v_good_direction({vertical, horizontal}, 2);
    CHECK(is_good_direction(u, {vertical, horizontal}));
    CHECK(u.back().sign() > 0);

    Simplex steep = simplex({pt({0, 0}), pt({e, 1})});
    Point w = v_good_direction({steep, horizontal}, 2);
    CHECK(is_good_direction(w, {steep, horizontal}));
    CHECK(is_good_direction(w, st_of_simplex_union({steep, horizontal})));

    std::size_t saved = direction_search_budget();
    direction_search_budget() = 1;
    CHECK(raises(ErrorKind::SearchExhausted, [&] { v_good_direction({vertical}, 2); }));
    direction_search_budget() = saved;
}

TEST_CASE("shear to vertical", "[plmap]")
{
    Shear s = shear_to_vertical(pt({1, 1}));
    CHECK(s.apply(pt({3, 2})) == pt({1, 2}));
    CHECK(s.apply(pt({1, 1})) == pt({0, 1}));
    CHECK(s.unapply(s.apply(pt({q(2, 7), e}))) == pt({q(2, 7), e}));
    Shear t = shear_to_vertical(pt({1, -2, 4}));
    CHECK(t.apply(pt({1, -2, 4})) == pt({0, 0, 4}));
    CHECK(raises(ErrorKind::PreconditionViolation, [&] { shear_to_vertical(pt({1, 0})); }));
}
