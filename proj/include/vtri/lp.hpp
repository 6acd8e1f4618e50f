#pragma once

#include "linalg.hpp"

#include <string>
#include <vector>

namespace vtri {

inline std::size_t& lp_pivot_cap()
{
    static std::size_t cap = 100000;
    return cap;
}

enum class Relation { LessEq, Equal, GreaterEq };

struct LinearConstraint {
    std::vector<FieldElement> coeffs;
    Relation relation;
    FieldElement rhs;
};

/// Linear program over the field. Variables are free unless marked nonnegative.
struct LinearProgram {
    std::size_t num_vars = 0;
    std::vector<bool> nonnegative;
    std::vector<LinearConstraint> rows;
    std::vector<FieldElement> objective;
    bool maximize = true;

    explicit LinearProgram(std::size_t n = 0)
        : num_vars(n), nonnegative(n, false), objective(n)
    {
    }

    std::size_t add_variable(bool nonneg)
    {
        ++num_vars;
        nonnegative.push_back(nonneg);
        objective.emplace_back();
        for (auto& r : rows)
            r.coeffs.emplace_back();
        return num_vars - 1;
    }

    void add(std::vector<FieldElement> coeffs, Relation rel, FieldElement rhs)
    {
        coeffs.resize(num_vars);
        rows.push_back({std::move(coeffs), rel, std::move(rhs)});
    }
};

struct LPOutcome {
    enum class Status { Optimal, Unbounded, Infeasible };
    Status status = Status::Infeasible;
    FieldElement value;
    Point point;

    bool optimal() const { return status == Status::Optimal; }
    bool feasible() const { return status != Status::Infeasible; }
};

namespace detail {

class SimplexTableau {
public:
    SimplexTableau(std::size_t rows, std::size_t cols)
        : t_(rows, std::vector<FieldElement>(cols + 1)), basis_(rows), cols_(cols), banned_(cols, false)
    {
    }

    std::vector<FieldElement>& row(std::size_t i) { return t_[i]; }
    std::size_t& basic(std::size_t i) { return basis_[i]; }
    std::size_t rows() const { return t_.size(); }
    std::size_t cols() const { return cols_; }
    const FieldElement& rhs(std::size_t i) const { return t_[i][cols_]; }
    void ban(std::size_t j) { banned_[j] = true; }
    std::size_t pivots() const { return pivots_; }

    void set_objective(const std::vector<FieldElement>& c)
    {
        obj_.assign(cols_ + 1, FieldElement());
        for (std::size_t j = 0; j < cols_; ++j)
            obj_[j] = c[j];
        for (std::size_t i = 0; i < rows(); ++i) {
            const FieldElement cb = c[basis_[i]];
            if (cb.is_zero())
                continue;
            for (std::size_t j = 0; j <= cols_; ++j)
                if (!t_[i][j].is_zero())
                    obj_[j] -= cb * t_[i][j];
        }
    }

    FieldElement value() const { return -obj_[cols_]; }

    /// Runs Bland's rule to optimality. Returns false when unbounded.
    bool optimize()
    {
        for (;;) {
            std::size_t enter = cols_;
            for (std::size_t j = 0; j < cols_; ++j) {
                if (!banned_[j] && obj_[j].sign() > 0) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols_)
                return true;
            std::size_t leave = rows();
            FieldElement best;
            for (std::size_t i = 0; i < rows(); ++i) {
                if (t_[i][enter].sign() <= 0)
                    continue;
                FieldElement ratio = t_[i][cols_] / t_[i][enter];
                int c = leave == rows() ? -1 : compare(ratio, best);
                if (c < 0 || (c == 0 && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == rows())
                return false;
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t r, std::size_t c)
    {
        if (++pivots_ > lp_pivot_cap())
            fail(ErrorKind::ResourceLimit, "simplex pivot cap " + std::to_string(lp_pivot_cap()) + " reached");
        std::vector<FieldElement>& pr = t_[r];
        FieldElement inv = 1 / pr[c];
        std::vector<std::size_t> nz;
        for (std::size_t j = 0; j <= cols_; ++j) {
            if (pr[j].is_zero())
                continue;
            pr[j] *= inv;
            nz.push_back(j);
        }
        auto eliminate = [&](std::vector<FieldElement>& target) {
            if (target[c].is_zero())
                return;
            FieldElement f = target[c];
            for (std::size_t j : nz)
                target[j] -= f * pr[j];
        };
        for (std::size_t i = 0; i < rows(); ++i)
            if (i != r)
                eliminate(t_[i]);
        if (!obj_.empty())
            eliminate(obj_);
        basis_[r] = c;
    }

    void drop_row(std::size_t i)
    {
        t_.erase(t_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
    }

private:
    std::vector<std::vector<FieldElement>> t_;
    std::vector<FieldElement> obj_;
    std::vector<std::size_t> basis_;
    std::size_t cols_;
    std::vector<bool> banned_;
    std::size_t pivots_ = 0;
};

} // namespace detail

/// Two-phase simplex method with Bland's rule, exact over the field.
inline LPOutcome solve_lp(const LinearProgram& lp)
{
    const std::size_t n = lp.num_vars;
    // column layout: for each variable a positive part, plus a negative part when free
    std::vector<std::size_t> pos_col(n), neg_col(n, SIZE_MAX);
    std::size_t cols = 0;
    for (std::size_t j = 0; j < n; ++j) {
        pos_col[j] = cols++;
        if (!lp.nonnegative[j])
            neg_col[j] = cols++;
    }
    const std::size_t structural = cols;
    std::vector<std::size_t> slack_col(lp.rows.size(), SIZE_MAX);
    for (std::size_t i = 0; i < lp.rows.size(); ++i)
        if (lp.rows[i].relation != Relation::Equal)
            slack_col[i] = cols++;

    // rows with a nonnegative rhs and a +1 slack start basic on that slack
    std::vector<int> flip(lp.rows.size(), 1);
    std::vector<std::size_t> art_col(lp.rows.size(), SIZE_MAX);
    std::size_t artificial_begin = cols;
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
        const auto& r = lp.rows[i];
        flip[i] = r.rhs.sign() < 0 ? -1 : 1;
        int slack_sign = r.relation == Relation::LessEq ? 1 : r.relation == Relation::GreaterEq ? -1 : 0;
        if (slack_sign * flip[i] != 1)
            art_col[i] = cols++;
    }

    detail::SimplexTableau tab(lp.rows.size(), cols);
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
        const auto& r = lp.rows[i];
        auto& row = tab.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (r.coeffs[j].is_zero())
                continue;
            FieldElement a = flip[i] < 0 ? -r.coeffs[j] : r.coeffs[j];
            row[pos_col[j]] = a;
            if (neg_col[j] != SIZE_MAX)
                row[neg_col[j]] = -a;
        }
        if (slack_col[i] != SIZE_MAX)
            row[slack_col[i]] = FieldElement((r.relation == Relation::LessEq ? 1 : -1) * flip[i]);
        row[cols] = flip[i] < 0 ? -r.rhs : r.rhs;
        if (art_col[i] != SIZE_MAX) {
            row[art_col[i]] = 1;
            tab.basic(i) = art_col[i];
        } else {
            tab.basic(i) = slack_col[i];
        }
    }

    LPOutcome out;
    if (artificial_begin < cols) {
        std::vector<FieldElement> c1(cols);
        for (std::size_t j = artificial_begin; j < cols; ++j)
            c1[j] = -1;
        tab.set_objective(c1);
        tab.optimize();
        if (tab.value().sign() < 0) {
            out.status = LPOutcome::Status::Infeasible;
            return out;
        }
        for (std::size_t i = tab.rows(); i-- > 0;) {
            if (tab.basic(i) < artificial_begin)
                continue;
            std::size_t j = 0;
            while (j < artificial_begin && tab.row(i)[j].is_zero())
                ++j;
            if (j < artificial_begin)
                tab.pivot(i, j);
            else
                tab.drop_row(i);
        }
        for (std::size_t j = artificial_begin; j < cols; ++j)
            tab.ban(j);
    }

    std::vector<FieldElement> c2(cols);
    for (std::size_t j = 0; j < n; ++j) {
        FieldElement cj = lp.maximize ? lp.objective[j] : -lp.objective[j];
        c2[pos_col[j]] = cj;
        if (neg_col[j] != SIZE_MAX)
            c2[neg_col[j]] = -cj;
    }
    tab.set_objective(c2);
    if (!tab.optimize()) {
        out.status = LPOutcome::Status::Unbounded;
        return out;
    }

    std::vector<FieldElement> colval(structural);
    for (std::size_t i = 0; i < tab.rows(); ++i)
        if (tab.basic(i) < structural)
            colval[tab.basic(i)] = tab.rhs(i);
    out.point.assign(n, FieldElement());
    for (std::size_t j = 0; j < n; ++j) {
        out.point[j] = colval[pos_col[j]];
        if (neg_col[j] != SIZE_MAX)
            out.point[j] -= colval[neg_col[j]];
    }
    out.status = LPOutcome::Status::Optimal;
    out.value = dot(lp.objective, out.point);

    // the optimal point is re-checked row by row
    for (const auto& r : lp.rows) {
        int c = compare(dot(r.coeffs, out.point), r.rhs);
        bool ok = r.relation == Relation::LessEq ? c <= 0 : r.relation == Relation::Equal ? c == 0 : c >= 0;
        if (!ok)
            fail(ErrorKind::VerificationFailed, "simplex method returned an infeasible point");
    }
    for (std::size_t j = 0; j < n; ++j)
        if (lp.nonnegative[j] && out.point[j].sign() < 0)
            fail(ErrorKind::VerificationFailed, "simplex method returned a negative variable");
    return out;
}

/// normal . x <= offset, or < when strict.
struct Halfspace {
    Point normal;
    FieldElement offset;
    bool strict = false;

    bool satisfied_by(const Point& x) const
    {
        int c = compare(dot(normal, x), offset);
        return strict ? c < 0 : c <= 0;
    }
};

struct Polyhedron {
    std::size_t dim = 0;
    std::vector<Halfspace> rows;
    /// Set when the polyhedron is known to be empty.
    bool empty = false;

    Polyhedron() = default;
    explicit Polyhedron(std::size_t n) : dim(n) {}

    void add(Point normal, FieldElement offset, bool strict = false)
    {
        if (normal.size() != dim)
            fail(ErrorKind::DimensionMismatch, "row dimension " + std::to_string(normal.size()) +
                                                   " in polyhedron of dimension " + std::to_string(dim));
        rows.push_back({std::move(normal), std::move(offset), strict});
    }

    void add_equality(const Point& normal, const FieldElement& offset)
    {
        add(normal, offset);
        add(FieldElement(-1) * normal, -offset);
    }

    bool contains(const Point& x) const
    {
        if (empty)
            return false;
        for (const auto& r : rows)
            if (!r.satisfied_by(x))
                return false;
        return true;
    }

    bool has_strict_rows() const
    {
        for (const auto& r : rows)
            if (r.strict)
                return true;
        return false;
    }
};

inline LinearProgram program_over(const Polyhedron& p)
{
    LinearProgram lp(p.dim);
    for (const auto& r : p.rows)
        lp.add(r.normal, Relation::LessEq, r.offset);
    return lp;
}

/// Maximizes objective . x over a polyhedron without strict rows.
inline LPOutcome lp_solve(const std::vector<FieldElement>& objective, const Polyhedron& p)
{
    if (p.has_strict_rows())
        fail(ErrorKind::PreconditionViolation, "lp_solve needs a polyhedron without strict rows");
    if (objective.size() != p.dim)
        fail(ErrorKind::DimensionMismatch, "objective dimension differs from polyhedron");
    if (p.empty)
        return {};
    LinearProgram lp = program_over(p);
    lp.objective = objective;
    return solve_lp(lp);
}

/// Decides emptiness exactly: the strict rows get a common slack d which is
/// maximized; the set is nonempty iff the optimum is positive.
inline std::optional<Point> find_point(const Polyhedron& p)
{
    if (p.empty)
        return std::nullopt;
    LinearProgram lp(p.dim + 1);
    const std::size_t d = p.dim;
    bool strict = false;
    for (const auto& r : p.rows) {
        std::vector<FieldElement> c = r.normal;
        c.emplace_back(r.strict ? 1 : 0);
        strict = strict || r.strict;
        lp.add(std::move(c), Relation::LessEq, r.offset);
    }
    std::vector<FieldElement> cap(p.dim + 1);
    cap[d] = 1;
    lp.add(cap, Relation::LessEq, FieldElement(1));
    if (!strict)
        lp.add(cap, Relation::Equal, FieldElement(0));
    lp.objective = cap;
    LPOutcome res = solve_lp(lp);
    if (!res.feasible())
        return std::nullopt;
    if (strict && res.value.sign() <= 0)
        return std::nullopt;
    res.point.pop_back();
    return res.point;
}

inline Polyhedron closure(const Polyhedron& p)
{
    Polyhedron out(p.dim);
    if (!find_point(p)) {
        out.empty = true;
        return out;
    }
    for (const auto& r : p.rows)
        out.add(r.normal, r.offset, false);
    return out;
}

} // namespace vtri
