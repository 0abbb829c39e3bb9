#include "mdlab/lp.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdlab::lp {

void LinearSystem::add(std::vector<double> a, Rel rel, double b, std::string tag) {
    a.resize(vars.size(), 0.0);
    rows.push_back(Row{std::move(a), rel, b, std::move(tag)});
}

namespace {

using Rational = boost::multiprecision::cpp_rational;

template <class T>
struct Scal;

template <>
struct Scal<double> {
    static double from(double x) { return x; }
    static double tol() { return 1e-9; }
    static bool pos(double x) { return x > tol(); }
    static bool neg(double x) { return x < -tol(); }
    static double to_double(double x) { return x; }
};

template <>
struct Scal<Rational> {
    static Rational from(double x) { return Rational(x); }  // exact binary expansion
    static Rational tol() { return 0; }
    static bool pos(const Rational& x) { return x > 0; }
    static bool neg(const Rational& x) { return x < 0; }
    static double to_double(const Rational& x) { return x.convert_to<double>(); }
};

// Dense two-phase simplex, Bland's rule. Standard form built internally:
// free x -> x+ - x-; rows normalized to a.x <= b with b sign handled by
// artificials in phase one.
template <class T>
LpResult simplex(const LinearSystem& sys, const std::vector<double>& cobj) {
    using S = Scal<T>;
    const std::size_t nfree = sys.vars.size();
    const std::size_t nv = 2 * nfree;  // split variables

    // expand rows: Eq -> Le + Ge; Ge -> negated Le. Keep as a.x <= b.
    std::vector<std::vector<T>> A;
    std::vector<T> B;
    for (const auto& r : sys.rows) {
        if (r.a.size() != nfree) throw std::invalid_argument("row width mismatch");
        auto push = [&](double sign) {
            std::vector<T> row(nv);
            for (std::size_t i = 0; i < nfree; ++i) {
                row[2 * i] = S::from(sign * r.a[i]);
                row[2 * i + 1] = S::from(-sign * r.a[i]);
            }
            A.push_back(std::move(row));
            B.push_back(S::from(sign * r.b));
        };
        if (r.rel == Rel::Le) {
            push(1.0);
        } else if (r.rel == Rel::Ge) {
            push(-1.0);
        } else {
            push(1.0);
            push(-1.0);
        }
    }
    const std::size_t m = A.size();

    // tableau columns: nv structural + m slacks + m artificials + rhs
    const std::size_t ncols = nv + m + m + 1;
    std::vector<std::vector<T>> t(m + 1, std::vector<T>(ncols, S::from(0.0)));
    std::vector<std::size_t> basis(m);
    std::size_t nart = 0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < nv; ++j) t[i][j] = A[i][j];
        t[i][ncols - 1] = B[i];
        t[i][nv + i] = S::from(1.0);  // slack
        if (S::neg(t[i][ncols - 1])) {
            for (std::size_t j = 0; j < ncols; ++j) t[i][j] = -t[i][j];
            // slack coefficient now -1; add artificial
            t[i][nv + m + i] = S::from(1.0);
            basis[i] = nv + m + i;
            ++nart;
        } else {
            basis[i] = nv + i;
        }
    }

    auto pivot = [&](std::size_t pr, std::size_t pc) {
        const T pv = t[pr][pc];
        for (std::size_t j = 0; j < ncols; ++j) t[pr][j] = t[pr][j] / pv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == pr) continue;
            const T f = t[i][pc];
            if (f == S::from(0.0)) continue;
            for (std::size_t j = 0; j < ncols; ++j) t[i][j] = t[i][j] - f * t[pr][j];
        }
        basis[pr] = pc;
    };

    // run simplex on current objective row t[m] (maximize -> reduced costs)
    auto run = [&](std::size_t allowed_cols) -> bool {  // returns false if unbounded
        for (;;) {
            // Bland: smallest index with positive reduced cost
            std::size_t pc = ncols;
            for (std::size_t j = 0; j < allowed_cols; ++j) {
                if (S::pos(t[m][j])) {
                    pc = j;
                    break;
                }
            }
            if (pc == ncols) return true;
            std::size_t pr = m;
            for (std::size_t i = 0; i < m; ++i) {
                if (!S::pos(t[i][pc])) continue;
                if (pr == m) {
                    pr = i;
                    continue;
                }
                // min ratio; Bland tie-break on basis index
                const T lhs = t[i][ncols - 1] * t[pr][pc];
                const T rhs = t[pr][ncols - 1] * t[i][pc];
                if (lhs < rhs || (lhs == rhs && basis[i] < basis[pr])) pr = i;
            }
            if (pr == m) return false;  // unbounded
            pivot(pr, pc);
        }
    };

    if (nart > 0) {
        // phase 1: maximize -sum(artificials)
        for (std::size_t j = 0; j < ncols; ++j) t[m][j] = S::from(0.0);
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] >= nv + m) {
                for (std::size_t j = 0; j < ncols; ++j) t[m][j] = t[m][j] + t[i][j];
            }
        }
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] >= nv + m) t[m][basis[i]] = S::from(0.0);
        run(nv + m);  // artificial columns never re-enter
        // remaining phase-1 objective = sum of artificials still in the solution
        const double resid = S::to_double(t[m][ncols - 1]);
        const bool infeas = std::is_same_v<T, Rational> ? (t[m][ncols - 1] != S::from(0.0)) : (resid > 1e-9);
        if (infeas) {
            LpResult r;
            r.feasible = false;
            r.infeas_residual = resid;
            return r;
        }
        // drive remaining artificials out of the basis when possible; a row
        // that cannot be pivoted out is all-zero (redundant) and stays inert
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < nv + m) continue;
            std::size_t pc = ncols;
            for (std::size_t j = 0; j < nv + m; ++j) {
                if (t[i][j] != S::from(0.0)) {
                    pc = j;
                    break;
                }
            }
            if (pc != ncols) pivot(i, pc);
        }
    }

    // phase 2 objective
    for (std::size_t j = 0; j < ncols; ++j) t[m][j] = S::from(0.0);
    for (std::size_t i = 0; i < nfree; ++i) {
        t[m][2 * i] = S::from(cobj.empty() ? 0.0 : cobj[i]);
        t[m][2 * i + 1] = S::from(cobj.empty() ? 0.0 : -cobj[i]);
    }
    // express objective in terms of nonbasic variables
    for (std::size_t i = 0; i < m; ++i) {
        const T f = t[m][basis[i]];
        if (f == S::from(0.0)) continue;
        for (std::size_t j = 0; j < ncols; ++j) t[m][j] = t[m][j] - f * t[i][j];
    }
    const bool bounded = run(nv + m);

    LpResult res;
    res.feasible = true;
    res.unbounded = !bounded;
    if (bounded) {
        std::vector<T> xv(nv, S::from(0.0));
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] < nv) xv[basis[i]] = t[i][ncols - 1];
        res.x.resize(nfree);
        double obj = 0;
        for (std::size_t i = 0; i < nfree; ++i) {
            res.x[i] = S::to_double(xv[2 * i]) - S::to_double(xv[2 * i + 1]);
            if (!cobj.empty()) obj += cobj[i] * res.x[i];
        }
        res.objective = obj;
    }
    return res;
}

}  // namespace

LpResult solve(const LinearSystem& sys, const std::vector<double>& c, bool exact) {
    if (exact) return simplex<Rational>(sys, c);
    return simplex<double>(sys, c);
}

LpResult check_feasible_auto(const LinearSystem& sys, double margin, std::size_t exact_var_cap) {
    LpResult r = solve(sys, {}, false);
    if (sys.vars.size() > exact_var_cap) return r;
    if (!r.feasible) {
        // only marginal rejections need the exact arithmetic
        if (r.infeas_residual > margin) return r;
        return solve(sys, {}, true);
    }
    // verify the witness satisfies rows within margin; if not, redo exactly
    bool marginal = r.x.empty();
    for (const auto& row : sys.rows) {
        if (marginal) break;
        double lhs = 0;
        for (std::size_t i = 0; i < row.a.size(); ++i) lhs += row.a[i] * r.x[i];
        const double viol = row.rel == Rel::Le   ? lhs - row.b
                            : row.rel == Rel::Ge ? row.b - lhs
                                                 : std::abs(lhs - row.b);
        if (viol > margin) marginal = true;
    }
    if (marginal) return solve(sys, {}, true);
    return r;
}

bool implied_by(const Ineq& row, const std::vector<Ineq>& rows, double tol) {
    LinearSystem sys;
    sys.vars.resize(row.a.size());
    for (const auto& r : rows) {
        sys.add(r.a, Rel::Le, r.b);
    }
    LpResult res = solve(sys, row.a, false);
    if (!res.feasible) return true;  // vacuous system implies everything
    if (res.unbounded) return false;
    return res.objective <= row.b + tol;
}

namespace {

// scale rows, drop all-zero rows, exact duplicates, and rows dominated by a
// parallel row with a smaller right-hand side
void fme_normalize(std::vector<Ineq>& rs, double tol) {
    std::vector<Ineq> out;
    for (auto& r : rs) {
        bool allzero = true;
        for (double a : r.a)
            if (std::abs(a) > tol) allzero = false;
        if (allzero) {
            if (r.b < -tol) throw std::runtime_error("fourier_motzkin: inconsistent system");
            continue;
        }
        double mx = 0;
        for (double a : r.a) mx = std::max(mx, std::abs(a));
        for (double& a : r.a) a /= mx;
        r.b /= mx;
        bool keep = true;
        for (auto& o : out) {
            bool parallel = true;
            for (std::size_t i = 0; parallel && i < r.a.size(); ++i)
                if (std::abs(o.a[i] - r.a[i]) > 1e-12) parallel = false;
            if (parallel) {
                o.b = std::min(o.b, r.b);
                keep = false;
                break;
            }
        }
        if (keep) out.push_back(std::move(r));
    }
    rs = std::move(out);
}

void lp_prune_rows(std::vector<Ineq>& rows, double tol) {
    for (std::size_t i = 0; i < rows.size();) {
        std::vector<Ineq> rest;
        rest.reserve(rows.size() - 1);
        for (std::size_t j = 0; j < rows.size(); ++j)
            if (j != i) rest.push_back(rows[j]);
        if (implied_by(rows[i], rest, tol)) {
            rows.erase(rows.begin() + std::ptrdiff_t(i));
        } else {
            ++i;
        }
    }
}

}  // namespace

std::vector<Ineq> fourier_motzkin(std::vector<Ineq> rows, const std::vector<int>& eliminate,
                                  const FmeOptions& opt) {
    fme_normalize(rows, opt.tol);
    std::vector<int> pending = eliminate;
    while (!pending.empty()) {
        // eliminate the variable with the fewest pos*neg combinations first
        std::size_t best = 0, best_cost = SIZE_MAX;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            std::size_t np = 0, nn = 0;
            for (const auto& r : rows) {
                const double a = r.a[std::size_t(pending[i])];
                if (a > opt.tol) ++np;
                else if (a < -opt.tol) ++nn;
            }
            const std::size_t cost = np * nn;
            if (cost < best_cost) {
                best_cost = cost;
                best = i;
            }
        }
        const int var = pending[best];
        pending.erase(pending.begin() + std::ptrdiff_t(best));

        std::vector<Ineq> zero, pos, neg;
        for (auto& r : rows) {
            const double a = r.a[std::size_t(var)];
            if (std::abs(a) <= opt.tol) {
                r.a[std::size_t(var)] = 0;
                zero.push_back(std::move(r));
            } else if (a > 0) {
                pos.push_back(std::move(r));
            } else {
                neg.push_back(std::move(r));
            }
        }
        if (zero.size() + pos.size() * neg.size() > opt.max_rows)
            throw std::runtime_error("fourier_motzkin: blowup cap exceeded; use pointwise membership checks");
        std::vector<Ineq> next = std::move(zero);
        for (const auto& p : pos) {
            const double ap = p.a[std::size_t(var)];
            for (const auto& n : neg) {
                const double an = -n.a[std::size_t(var)];
                Ineq c;
                c.a.resize(p.a.size());
                for (std::size_t i = 0; i < p.a.size(); ++i) c.a[i] = p.a[i] / ap + n.a[i] / an;
                c.a[std::size_t(var)] = 0;
                c.b = p.b / ap + n.b / an;
                next.push_back(std::move(c));
            }
        }
        fme_normalize(next, opt.tol);
        // keep intermediate systems small; exact pruning is cheap at this scale
        if (opt.lp_prune && next.size() > 60) lp_prune_rows(next, opt.tol);
        rows = std::move(next);
    }
    if (opt.lp_prune) lp_prune_rows(rows, opt.tol);
    return rows;
}

}  // namespace mdlab::lp
