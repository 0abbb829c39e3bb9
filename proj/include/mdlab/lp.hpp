#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mdlab::lp {

enum class Rel { Le, Ge, Eq };

// One linear constraint sum_i a[i] x[i] (rel) b over free variables.
struct Row {
    std::vector<double> a;
    Rel rel = Rel::Le;
    double b = 0;
    std::string tag;
};

struct LinearSystem {
    std::vector<std::string> vars;
    std::vector<Row> rows;

    void add(std::vector<double> a, Rel rel, double b, std::string tag = {});
};

struct LpResult {
    bool feasible = false;
    bool unbounded = false;
    double objective = 0;
    double infeas_residual = 0;  // phase-1 optimum; > 0 when infeasible
    std::vector<double> x;       // witness / optimizer (empty when infeasible)
};

// max c.x subject to sys (variables free). Use c = 0 for pure feasibility.
// Floating-point simplex with Bland's rule; `exact` switches to rational
// arithmetic with coefficients taken bit-exactly from the doubles.
LpResult solve(const LinearSystem& sys, const std::vector<double>& c, bool exact = false);

// Feasibility with automatic exact-rational fallback when the float verdict
// is marginal (phase-1 objective within `margin` of zero).
LpResult check_feasible_auto(const LinearSystem& sys, double margin = 1e-7, std::size_t exact_var_cap = 40);

// Inequality-only view used by Fourier-Motzkin: rows a.x <= b.
struct Ineq {
    std::vector<double> a;
    double b = 0;
};

struct FmeOptions {
    std::size_t max_rows = 20000;   // hard blowup cap (throws when exceeded)
    bool lp_prune = true;           // drop rows implied by the others
    double tol = 1e-9;
};

// Eliminates the given variable indices (values referring to the input system's
// columns); the result keeps all columns but eliminated ones have zero
// coefficients. Rows are sound: every output row is implied by the input.
std::vector<Ineq> fourier_motzkin(std::vector<Ineq> rows, const std::vector<int>& eliminate,
                                  const FmeOptions& opt = {});

// true when `row` is implied by `rows` (max a.x over rows stays <= b + tol)
bool implied_by(const Ineq& row, const std::vector<Ineq>& rows, double tol = 1e-9);

}  // namespace mdlab::lp
