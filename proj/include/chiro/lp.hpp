#pragma once

#include "chiro/linalg.hpp"

namespace chiro {

// Exact rational linear program over free variables.
struct LinearProgram {
    enum Rel { LE, EQ, GE };

    explicit LinearProgram(std::size_t nvars) : nvars(nvars), objective(nvars, Scalar(0)) {}

    std::size_t nvars;
    std::vector<Vec> rows;
    std::vector<Rel> rels;
    Vec rhs;
    Vec objective;       // maximized
    void add(Vec coeffs, Rel rel, Scalar b);
};

struct LpSolution {
    enum Status { Optimal, Infeasible, Unbounded };
    Status status;
    Vec x;         // only meaningful when Optimal
    Scalar value;  // objective at x
};

// Two-phase simplex with Bland's rule; exact, always terminates.
LpSolution solve_lp(const LinearProgram& lp);

bool lp_feasible(const LinearProgram& lp);

}  // namespace chiro
