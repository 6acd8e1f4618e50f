#include <vtri/simplicial.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
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

// Classical barycentric subdivision over Q, built as cones from barycenters
// over the subdivided boundary.
std::set<std::vector<Point>> classical_subdivision(const std::vector<Point>& verts)
{
    std::set<std::vector<Point>> out;
    Point c(verts[0].size());
    for (const auto& v : verts)
        c = c + v;
    c = FieldElement(Rational(1, static_cast<long>(verts.size()))) * c;
    if (verts.size() == 1) {
        out.insert({c});
        return out;
    }
    for (std::size_t i = 0; i < verts.size(); ++i) {
        std::vector<Point> facet;
        for (std::size_t j = 0; j < verts.size(); ++j)
            if (j != i)
                facet.push_back(verts[j]);
        for (auto s : classical_subdivision(facet)) {
            s.push_back(c);
            std::sort(s.begin(), s.end(), PointLess());
            out.insert(s);
        }
    }
    return out;
}

std::set<std::vector<Point>> maximal_point_sets(const Complex& k)
{
    std::set<std::vector<Point>> out;
    for (const auto& s : k.maximal_simplexes()) {
        auto v = s.vertices;
        std::sort(v.begin(), v.end(), PointLess());
        out.insert(v);
    }
    return out;
}

Simplex random_simplex(std::mt19937_64& rng, std::size_t n, std::size_t m, int spread = 2)
{
    std::uniform_int_distribution<int> coef(-2, 2), st(0, spread);
    for (;;) {
        std::vector<Point> vs;
        for (std::size_t k = 0; k <= m; ++k) {
            Point v(n);
            for (auto& x : v)
                x = FieldElement(st(rng)) + coef(rng) * e;
            vs.push_back(v);
        }
        if (affinely_independent(vs))
            return Simplex(vs);
    }
}

} // namespace

TEST_CASE("complex validation")
{
    Complex tri = validate_complex({simplex({pt({0, 0}), pt({1, 0}), pt({0, 1})})});
    CHECK(tri.size() == 7);
    CHECK(tri.f_vector() == std::vector<std::size_t>{3, 3, 1});
    Complex two = validate_complex({simplex({pt({0, 0}), pt({1, 0}), pt({0, 1})}),
                                    simplex({pt({1, 0}), pt({0, 1}), pt({1, 1})})});
    CHECK(two.maximal().size() == 2);
    try {
        validate_complex({simplex({pt({0, 0}), pt({2, 0})}), simplex({pt({1, 0}), pt({3, 0})})});
        FAIL("overlap accepted");
    } catch (const IntersectionViolation& v) {
        CHECK(contains(v.first, v.point));
        CHECK(contains(v.second, v.point));
    }
    // touching at an infinitesimal distance is fine, crossing is not
    CHECK_NOTHROW(validate_complex({simplex({pt({0, 0}), pt({1, 0})}), simplex({pt({0, e}), pt({1, e})})}));
    CHECK(raises(ErrorKind::IntersectionViolation, [] {
        validate_complex({simplex({pt({0, 0}), pt({1, e})}), simplex({pt({0, e}), pt({1, 0})})});
    }));
    // a vertex in the middle of an edge
    CHECK(raises(ErrorKind::IntersectionViolation, [] {
        validate_complex({simplex({pt({0, 0}), pt({2, 0})}), simplex({pt({1, 0}), pt({1, 1})})});
    }));
    CHECK(missing_face({simplex({pt({0, 0}), pt({1, 0})}), simplex({pt({0, 0})})}) == Simplex({pt({1, 0})}));
}

TEST_CASE("simplicial sequences")
{
    CHECK(is_simplicial_sequence({pt({0, 0}), pt({1, 0}), pt({1, 0})}) == std::vector<std::size_t>{0, 1});
    CHECK_FALSE(is_simplicial_sequence({pt({0, 0}), pt({1, 0}), pt({0, 0})}));
    CHECK(is_simplicial_sequence({pt({0, 0}), pt({1, 0}), pt({1, 0}), pt({q(1, 2), 1})}) ==
          std::vector<std::size_t>{0, 1, 3});
}

TEST_CASE("V-simplex orders")
{
    VSimplexOrder o = v_simplex_order(simplex({pt({0, 0}), pt({1, 0}), pt({1, e})}));
    CHECK(o.order == std::vector<std::size_t>{0, 1, 2});
    CHECK(o.block_starts == std::vector<std::size_t>{0, 1});
    CHECK(raises(ErrorKind::NotVSimplex, [] { v_simplex_order(simplex({pt({0, 0}), pt({1, 0}), pt({q(1, 2), e})})); }));
    VSimplexOrder r = v_simplex_order(simplex({pt({0, 0}), pt({1, 0}), pt({0, 1})}));
    CHECK(r.order == std::vector<std::size_t>{0, 1, 2});
    CHECK(r.block_starts == std::vector<std::size_t>{0, 1, 2});
    // members of a class are moved next to each other
    VSimplexOrder s = v_simplex_order(simplex({pt({1, e}), pt({0, 0}), pt({1, 0})}));
    CHECK(s.order == std::vector<std::size_t>{0, 2, 1});
    CHECK(s.block_starts == std::vector<std::size_t>{0, 2});
}

TEST_CASE("V-simplex order agrees with the st face complex test")
{
    std::mt19937_64 rng(17);
    int yes = 0, no = 0;
    for (int it = 0; it < 150; ++it) {
        std::size_t n = 2 + static_cast<std::size_t>(it % 2);
        Simplex s = random_simplex(rng, n, 1 + static_cast<std::size_t>(it / 2) % n, 1);
        if (it % 4 == 2 && s.vertices.size() > 2) {
            // put the last standard part on the segment between the first two
            Point mid = FieldElement(Rational(1, 2)) * (standard_part(s.vertices[0]) + standard_part(s.vertices[1]));
            Point noise = s.vertices.back() - standard_part(s.vertices.back());
            std::vector<Point> vs = s.vertices;
            vs.back() = mid + noise;
            if (!affinely_independent(vs))
                continue;
            s = Simplex(vs);
        }
        bool ordered = true;
        try {
            v_simplex_order(s);
        } catch (const Error& err) {
            REQUIRE(err.kind() == ErrorKind::NotVSimplex);
            ordered = false;
        }
        CHECK(ordered == st_faces_form_complex(s));
        (ordered ? yes : no)++;
    }
    CHECK(yes > 10);
    CHECK(no > 10);
}

TEST_CASE("prism complexes")
{
    VSimplexOrder unit = v_simplex_order(simplex({pt({0}), pt({1})}));
    VComplex l = prism_complex(unit, {0, 0}, {1, 1});
    CHECK(l.base.f_vector() == std::vector<std::size_t>{4, 5, 2});
    std::vector<Simplex> square = {simplex({pt({0, 0}), pt({1, 0}), pt({1, 1})}),
                                   simplex({pt({0, 0}), pt({0, 1}), pt({1, 1})})};
    CHECK(same_union(l.base.maximal_simplexes(), square));

    VComplex flat = prism_complex(unit, {0, 1}, {0, 1});
    CHECK(flat.base.size() == 3);

    VSimplexOrder thin = v_simplex_order(simplex({pt({0, 0}), pt({1, 0}), pt({1, e})}));
    VComplex t = prism_complex(thin, {0, 0, 0}, {1, 1, 1});
    CHECK(t.st.dim() == 2);
    CHECK(same_union(t.st.maximal_simplexes(), {simplex({pt({0, 0, 0}), pt({1, 0, 0}), pt({1, 0, 1})}),
                                                simplex({pt({0, 0, 0}), pt({0, 0, 1}), pt({1, 0, 1})})}));

    CHECK(raises(ErrorKind::PreconditionViolation, [&] { prism_complex(unit, {1, 0}, {0, 1}); }));
    // heights with different standard parts inside a block
    CHECK(raises(ErrorKind::PreconditionViolation, [&] { prism_complex(thin, {0, 0, 1}, {2, 2, 2}); }));
}

TEST_CASE("random prisms are V-complexes")
{
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> coef(0, 3);
    int built = 0;
    for (int it = 0; it < 60 && built < 25; ++it) {
        Simplex s = random_simplex(rng, 2, 1 + static_cast<std::size_t>(it % 2));
        VSimplexOrder o;
        try {
            o = v_simplex_order(s);
        } catch (const Error&) {
            continue;
        }
        std::vector<FieldElement> r(o.order.size()), h(o.order.size());
        FieldElement base_r = FieldElement(coef(rng)), base_h = FieldElement(coef(rng) + 1);
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::size_t blk = o.block_of(i);
            r[i] = base_r + FieldElement(static_cast<long>(blk)) + coef(rng) * e;
            h[i] = r[i] + base_h + coef(rng) * e;
        }
        VComplex l = prism_complex(o, r, h);
        CHECK_FALSE(find_intersection_violation(l.base));
        CHECK_FALSE(find_intersection_violation(l.st));
        ++built;
    }
    CHECK(built >= 20);
}

TEST_CASE("interior points")
{
    Simplex rat = simplex({pt({0, 0}), pt({3, 0}), pt({0, 3})});
    CHECK(choose_interior_point(rat) == pt({1, 1}));
    Point p = choose_interior_point(simplex({pt({0, 0}), pt({1, 0}), pt({1, e})}));
    CHECK(standard_part(p) == pt({q(1, 2), 0}));
    CHECK(contains_in_interior(simplex({pt({0, 0}), pt({1, 0}), pt({1, e})}), p));
    CHECK(choose_interior_point(simplex({pt({0}), pt({e})})) == pt({e / 2}));
}

TEST_CASE("flag subdivisions")
{
    VComplex tri = make_vcomplex(validate_complex({simplex({pt({0, 0}), pt({1, 0}), pt({0, 1})})}));
    VComplex b = flag_subdivision(tri);
    CHECK(b.base.maximal().size() == 6);
    CHECK(maximal_point_sets(b.base) == classical_subdivision(tri.base.vertices()));

    VComplex seg = make_vcomplex(validate_complex({simplex({pt({0}), pt({1})})}));
    VComplex bs = flag_subdivision(seg);
    CHECK(maximal_point_sets(bs.base) == std::set<std::vector<Point>>{{pt({0}), pt({q(1, 2)})}, {pt({q(1, 2)}), pt({1})}});

    VComplex thin = make_vcomplex(validate_complex({simplex({pt({0, 0}), pt({1, 0}), pt({1, e})})}));
    VComplex bt = flag_subdivision(thin);
    CHECK(same_union(bt.base.maximal_simplexes(), thin.base.maximal_simplexes()));
    CHECK(maximal_point_sets(bt.st) == classical_subdivision({pt({0, 0}), pt({1, 0})}));

    CHECK(raises(ErrorKind::PreconditionViolation,
                 [&] { flag_subdivision(tri, [](const Simplex& s) { return s.vertices[0]; }); }));
}

TEST_CASE("complex types")
{
    VComplex thin = make_vcomplex(validate_complex({simplex({pt({0, 0}), pt({1, 0}), pt({1, e})})}));
    ComplexType t = complex_type(thin);
    CHECK(t.n == 3);
    CHECK(t.c.size() == 7);
    CHECK(t.e == std::vector<int>{0, 1, 1});

    VComplex a = make_vcomplex(validate_complex({simplex({pt({0}), pt({1})})}));
    VComplex b = make_vcomplex(validate_complex({simplex({pt({5}), pt({7})})}));
    CHECK(type_equal(complex_type(a), complex_type(b)));
    VComplex c = make_vcomplex(validate_complex({simplex({pt({0}), pt({e})})}));
    CHECK_FALSE(type_equal(complex_type(a), complex_type(c)));
}

TEST_CASE("type equality agrees with brute force over permutations")
{
    std::mt19937_64 rng(41);
    auto random_type = [&](int n) {
        ComplexType t;
        t.n = n;
        for (int v = 0; v < n; ++v) {
            t.c.insert({v});
            t.e.push_back(static_cast<int>(rng() % 3));
        }
        for (int k = 0; k < 3; ++k) {
            VertexSet s;
            for (int v = 0; v < n; ++v)
                if (rng() % 2)
                    s.push_back(v);
            if (s.size() < 2)
                continue;
            // close under subsets
            for (unsigned mask = 1; mask < (1u << s.size()); ++mask) {
                VertexSet f;
                for (std::size_t i = 0; i < s.size(); ++i)
                    if (mask & (1u << i))
                        f.push_back(s[i]);
                t.c.insert(f);
            }
        }
        return t;
    };
    auto brute = [](const ComplexType& a, const ComplexType& b) {
        if (a.n != b.n)
            return false;
        std::vector<int> p(static_cast<std::size_t>(a.n));
        for (int i = 0; i < a.n; ++i)
            p[static_cast<std::size_t>(i)] = i;
        do {
            bool ok = true;
            for (int u = 0; u < a.n && ok; ++u)
                for (int v = 0; v < a.n && ok; ++v)
                    ok = (a.e[static_cast<std::size_t>(u)] == a.e[static_cast<std::size_t>(v)]) ==
                         (b.e[static_cast<std::size_t>(p[static_cast<std::size_t>(u)])] ==
                          b.e[static_cast<std::size_t>(p[static_cast<std::size_t>(v)])]);
            std::set<VertexSet> img;
            for (const auto& s : a.c) {
                VertexSet f;
                for (int x : s)
                    f.push_back(p[static_cast<std::size_t>(x)]);
                std::sort(f.begin(), f.end());
                img.insert(f);
            }
            if (ok && img == b.c)
                return true;
        } while (std::next_permutation(p.begin(), p.end()));
        return false;
    };
    int equal = 0;
    for (int it = 0; it < 200; ++it) {
        int n = 3 + it % 4;
        ComplexType a = random_type(n);
        ComplexType b;
        if (it % 2) {
            // a relabeled copy
            std::vector<int> p(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                p[static_cast<std::size_t>(i)] = i;
            std::shuffle(p.begin(), p.end(), rng);
            b.n = n;
            b.e.assign(static_cast<std::size_t>(n), 0);
            for (int v = 0; v < n; ++v)
                b.e[static_cast<std::size_t>(p[static_cast<std::size_t>(v)])] = a.e[static_cast<std::size_t>(v)];
            for (const auto& s : a.c) {
                VertexSet f;
                for (int x : s)
                    f.push_back(p[static_cast<std::size_t>(x)]);
                std::sort(f.begin(), f.end());
                b.c.insert(f);
            }
        } else {
            b = random_type(n);
        }
        auto pi = type_equal(a, b);
        CHECK(pi.has_value() == brute(a, b));
        equal += pi.has_value();
    }
    CHECK(equal >= 100);
    ComplexType big;
    big.n = 65;
    CHECK(raises(ErrorKind::ResourceLimit, [&] { type_equal(big, big); }));
}

TEST_CASE("intersection check agrees with pairwise linear programs")
{
    // tetrahedra on a small grid, some lifted by epsilon, so that many pairs
    // share vertices or touch along planes
    std::mt19937 rng(5);
    std::vector<Point> grid;
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            for (int z = 0; z < 2; ++z)
                grid.push_back(pt({q(x), q(y), z == 0 ? q(0) : (x + y) % 2 ? e : q(1)}));
    int proper = 0, improper = 0;
    for (int trial = 0; trial < 150; ++trial) {
        auto random_tet = [&](std::vector<Point> v) {
            while (true) {
                std::vector<Point> w = v;
                while (w.size() < 4) {
                    const Point& p = grid[rng() % grid.size()];
                    if (std::find(w.begin(), w.end(), p) == w.end())
                        w.push_back(p);
                }
                if (affinely_independent(w))
                    return Simplex(w);
            }
        };
        std::vector<Simplex> tets = {random_tet({})};
        // the second keeps up to three vertices of the first
        std::vector<Point> keep = tets[0].vertices;
        std::shuffle(keep.begin(), keep.end(), rng);
        keep.resize(rng() % 4);
        tets.push_back(random_tet(keep));
        Complex k = Complex::from_simplexes(tets);
        auto ms = k.maximal_simplexes();
        bool bad = false;
        for (std::size_t i = 0; i < ms.size() && !bad; ++i)
            for (std::size_t j = i + 1; j < ms.size() && !bad; ++j)
                bad = improper_intersection(ms[i], ms[j]).has_value();
        auto v = find_intersection_violation(k);
        CHECK(v.has_value() == bad);
        if (v) {
            CHECK(contains(v->first, v->point));
            CHECK(contains(v->second, v->point));
        }
        (bad ? improper : proper)++;
    }
    CHECK(proper > 10);
    CHECK(improper > 10);
}
