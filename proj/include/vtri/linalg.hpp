#pragma once

#include "scalar.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace vtri {

using Point = std::vector<FieldElement>;
using Matrix = std::vector<std::vector<FieldElement>>;

inline std::string to_string(const Point& p)
{
    std::string out = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i)
            out += ", ";
        out += p[i].str();
    }
    return out + ")";
}

inline void require_same_dim(const Point& a, const Point& b)
{
    if (a.size() != b.size())
        fail(ErrorKind::DimensionMismatch,
             "dimensions " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
}

inline Point operator+(const Point& a, const Point& b)
{
    require_same_dim(a, b);
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] + b[i];
    return r;
}

inline Point operator-(const Point& a, const Point& b)
{
    require_same_dim(a, b);
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] - b[i];
    return r;
}

inline Point operator*(const FieldElement& c, const Point& a)
{
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = c * a[i];
    return r;
}

inline FieldElement dot(const Point& a, const Point& b)
{
    require_same_dim(a, b);
    FieldElement r;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!a[i].is_zero() && !b[i].is_zero())
            r += a[i] * b[i];
    return r;
}

inline Point zero_point(std::size_t n) { return Point(n); }

inline Point unit_vector(std::size_t n, std::size_t i)
{
    Point p(n);
    p[i] = 1;
    return p;
}

inline bool is_zero_vector(const Point& p)
{
    for (const auto& x : p)
        if (!x.is_zero())
            return false;
    return true;
}

inline bool is_v_bounded(const Point& p)
{
    for (const auto& x : p)
        if (!x.is_finite())
            return false;
    return true;
}

inline bool is_rational_point(const Point& p)
{
    for (const auto& x : p)
        if (!x.is_rational())
            return false;
    return true;
}

/// Coordinatewise standard part as a point with rational entries.
inline Point standard_part(const Point& p)
{
    Point r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!p[i].is_finite())
            fail(ErrorKind::NotFinite, "point " + to_string(p) + " is not V-bounded");
        r[i] = FieldElement(p[i].standard_part());
    }
    return r;
}

/// Field-order lexicographic comparison.
inline int compare_points(const Point& a, const Point& b)
{
    require_same_dim(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) {
        int c = compare(a[i], b[i]);
        if (c != 0)
            return c;
    }
    return 0;
}

struct PointLess {
    bool operator()(const Point& a, const Point& b) const { return compare_points(a, b) < 0; }
};

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> row_reduce(Matrix& m)
{
    std::vector<std::size_t> pivots;
    if (m.empty())
        return pivots;
    std::size_t cols = m[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
        std::size_t p = r;
        while (p < m.size() && m[p][c].is_zero())
            ++p;
        if (p == m.size())
            continue;
        std::swap(m[p], m[r]);
        FieldElement inv = 1 / m[r][c];
        for (std::size_t j = c; j < cols; ++j)
            if (!m[r][j].is_zero())
                m[r][j] *= inv;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == r || m[i][c].is_zero())
                continue;
            FieldElement f = m[i][c];
            for (std::size_t j = c; j < cols; ++j)
                if (!m[r][j].is_zero())
                    m[i][j] -= f * m[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t rank(Matrix m) { return row_reduce(m).size(); }

/// Basis of {x : m x = 0}; `cols` is needed when m has no rows.
inline std::vector<Point> nullspace(Matrix m, std::size_t cols)
{
    std::vector<std::size_t> pivots = row_reduce(m);
    std::vector<bool> is_pivot(cols, false);
    for (auto c : pivots)
        is_pivot[c] = true;
    std::vector<Point> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f])
            continue;
        Point v(cols);
        v[f] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r)
            v[pivots[r]] = -m[r][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Some solution of a x = b, or nullopt if inconsistent.
inline std::optional<Point> solve(const Matrix& a, const Point& b, std::size_t cols)
{
    Matrix m = a;
    for (std::size_t i = 0; i < m.size(); ++i)
        m[i].push_back(b[i]);
    if (m.empty())
        return Point(cols);
    std::vector<std::size_t> pivots = row_reduce(m);
    if (!pivots.empty() && pivots.back() == cols)
        return std::nullopt;
    Point x(cols);
    for (std::size_t r = 0; r < pivots.size(); ++r)
        x[pivots[r]] = m[r][cols];
    return x;
}

/// Point with denominators cleared: (X_1, ..., X_n, W) with x_k = X_k / W
/// and W positive.
using HomogeneousPoint = std::vector<poly::Poly>;

inline HomogeneousPoint homogeneous(const Point& x)
{
    const poly::Poly one{Rational(1)};
    std::vector<poly::Poly> dens;
    for (const auto& c : x)
        if (c.denominator() != one &&
            std::find(dens.begin(), dens.end(), c.denominator()) == dens.end())
            dens.push_back(c.denominator());
    HomogeneousPoint h;
    for (const auto& c : x) {
        poly::Poly v = c.numerator();
        for (const auto& d : dens)
            if (d != c.denominator())
                v = poly::mul(v, d);
        h.push_back(std::move(v));
    }
    poly::Poly w = one;
    for (const auto& d : dens)
        w = poly::mul(w, d);
    h.push_back(std::move(w));
    return h;
}

namespace detail {

inline int poly_sign(const poly::Poly& p)
{
    int o = poly::ord(p);
    return o < 0 ? 0 : sgn(p[static_cast<std::size_t>(o)]);
}

/// Determinant of the rows from row on, restricted to cols, by cofactor expansion.
inline poly::Poly poly_det(const std::vector<const HomogeneousPoint*>& m, std::size_t row,
                           std::vector<std::size_t>& cols)
{
    if (row == m.size())
        return poly::Poly{Rational(1)};
    poly::Poly total;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        std::size_t col = cols[c];
        if (poly::ord((*m[row])[col]) < 0)
            continue;
        cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(c));
        poly::Poly term = poly::mul((*m[row])[col], poly_det(m, row + 1, cols));
        cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(c), col);
        total = c % 2 == 0 ? poly::add(total, term) : poly::sub(total, term);
    }
    return total;
}

} // namespace detail

/// Coefficients h of the hyperplane through n homogeneous points of R^n,
/// scaled so that side_of(h, q) is the orientation of q. All zero when the
/// points are affinely dependent.
inline std::vector<poly::Poly> hyperplane_through(const std::vector<HomogeneousPoint>& pts)
{
    const std::size_t n = pts.size();
    std::vector<const HomogeneousPoint*> rows;
    for (const auto& p : pts)
        rows.push_back(&p);
    std::vector<poly::Poly> h;
    for (std::size_t k = 0; k <= n; ++k) {
        std::vector<std::size_t> cols;
        for (std::size_t c = 0; c <= n; ++c)
            if (c != k)
                cols.push_back(c);
        poly::Poly minor = detail::poly_det(rows, 0, cols);
        h.push_back(k % 2 == 0 ? minor : poly::scale(minor, Rational(-1)));
    }
    return h;
}

/// Sign of q against h from hyperplane_through: 0 on the plane.
inline int side_of(const std::vector<poly::Poly>& h, const HomogeneousPoint& q)
{
    poly::Poly total;
    for (std::size_t k = 0; k < h.size(); ++k)
        if (poly::ord(h[k]) >= 0 && poly::ord(q[k]) >= 0)
            total = poly::add(total, poly::mul(h[k], q[k]));
    return detail::poly_sign(total);
}

/// Sign of det[p_1 - p_0, ..., p_(n-1) - p_0, q - p_0] for n points of R^n:
/// which side of the hyperplane through the points q lies on, 0 when on it
/// or when the points are affinely dependent.
inline int orientation(const std::vector<Point>& pts, const Point& q)
{
    if (pts.size() != q.size())
        fail(ErrorKind::DimensionMismatch, "orientation needs as many points as coordinates");
    std::vector<HomogeneousPoint> hp;
    for (const auto& p : pts)
        hp.push_back(homogeneous(p));
    return side_of(hyperplane_through(hp), homogeneous(q));
}

inline std::vector<Point> difference_vectors(const std::vector<Point>& pts)
{
    std::vector<Point> d;
    for (std::size_t i = 1; i < pts.size(); ++i)
        d.push_back(pts[i] - pts[0]);
    return d;
}

inline bool affinely_independent(const std::vector<Point>& pts)
{
    if (pts.empty())
        return true;
    for (const auto& p : pts)
        require_same_dim(p, pts[0]);
    if (pts.size() > pts[0].size() + 1)
        return false;
    return rank(difference_vectors(pts)) == pts.size() - 1;
}

/// Dimension of the affine hull; -1 for the empty set.
inline int affine_dimension(const std::vector<Point>& pts)
{
    if (pts.empty())
        return -1;
    return static_cast<int>(rank(difference_vectors(pts)));
}

inline bool in_linear_span(const std::vector<Point>& vs, const Point& u)
{
    std::size_t r = rank(vs);
    std::vector<Point> w = vs;
    w.push_back(u);
    return rank(w) == r;
}

/// Closed simplex given by its ordered vertex list.
struct Simplex {
    std::vector<Point> vertices;

    Simplex() = default;
    explicit Simplex(std::vector<Point> v) : vertices(std::move(v)) {}

    /// Checked construction: equal dimensions and affine independence.
    static Simplex make(std::vector<Point> v)
    {
        if (v.empty())
            fail(ErrorKind::PreconditionViolation, "simplex with no vertices");
        if (!affinely_independent(v))
            fail(ErrorKind::PreconditionViolation, "vertices are affinely dependent");
        return Simplex(std::move(v));
    }

    int dim() const { return static_cast<int>(vertices.size()) - 1; }
    std::size_t ambient() const { return vertices.empty() ? 0 : vertices[0].size(); }

    Point barycenter() const
    {
        Point c(ambient());
        for (const auto& v : vertices)
            c = c + v;
        return FieldElement(Rational(1, static_cast<long>(vertices.size()))) * c;
    }

    bool v_bounded() const
    {
        for (const auto& v : vertices)
            if (!is_v_bounded(v))
                return false;
        return true;
    }

    friend bool operator==(const Simplex& a, const Simplex& b) { return a.vertices == b.vertices; }
};

inline std::string to_string(const Simplex& s)
{
    std::string out = "[";
    for (std::size_t i = 0; i < s.vertices.size(); ++i) {
        if (i)
            out += ", ";
        out += to_string(s.vertices[i]);
    }
    return out + "]";
}

/// Affine coordinates of x relative to the vertices of S when x lies in
/// their affine span.
inline std::optional<std::vector<FieldElement>> affine_coordinates(const Simplex& s, const Point& x)
{
    require_same_dim(s.vertices.at(0), x);
    std::size_t m = s.vertices.size() - 1, n = x.size();
    Matrix a(n, std::vector<FieldElement>(m));
    Point rhs = x - s.vertices[0];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            a[i][j] = s.vertices[j + 1][i] - s.vertices[0][i];
    auto t = solve(a, rhs, m);
    if (!t)
        return std::nullopt;
    std::vector<FieldElement> coords(m + 1);
    FieldElement rest = 1;
    for (std::size_t j = 0; j < m; ++j) {
        coords[j + 1] = (*t)[j];
        rest -= (*t)[j];
    }
    coords[0] = rest;
    return coords;
}

struct Outside {
    /// Index of the first negative coordinate; empty when x is off the affine span.
    std::optional<std::size_t> negative_coordinate;
    std::vector<FieldElement> coordinates;
};

inline std::variant<std::vector<FieldElement>, Outside> barycentric_coordinates(const Simplex& s,
                                                                                const Point& x)
{
    auto coords = affine_coordinates(s, x);
    if (!coords)
        return Outside{std::nullopt, {}};
    for (std::size_t i = 0; i < coords->size(); ++i)
        if ((*coords)[i].sign() < 0)
            return Outside{i, *coords};
    return *coords;
}

inline bool contains(const Simplex& s, const Point& x)
{
    auto coords = affine_coordinates(s, x);
    if (!coords)
        return false;
    for (const auto& t : *coords)
        if (t.sign() < 0)
            return false;
    return true;
}

inline bool contains_in_interior(const Simplex& s, const Point& x)
{
    auto coords = affine_coordinates(s, x);
    if (!coords)
        return false;
    for (const auto& t : *coords)
        if (t.sign() <= 0)
            return false;
    return true;
}

inline Point affine_combination(const std::vector<Point>& pts, const std::vector<FieldElement>& w)
{
    Point r(pts.at(0).size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (!w[i].is_zero())
            r = r + w[i] * pts[i];
    return r;
}

inline FieldElement sup_distance(const Point& a, const Point& b)
{
    require_same_dim(a, b);
    FieldElement r;
    for (std::size_t i = 0; i < a.size(); ++i)
        r = max(r, abs(a[i] - b[i]));
    return r;
}

} // namespace vtri
