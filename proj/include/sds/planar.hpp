#ifndef SDS_PLANAR_HPP
#define SDS_PLANAR_HPP

#include "sds/background.hpp"
#include "sds/grid.hpp"
#include "sds/model.hpp"

#include <vector>

namespace sds {

// Discrete solution v of the regularized planar equation on a Grid.
// u = u0 + v is the physical field. Boundary nodes carry v = 0.
struct PlanarField {
    PlanarField(Grid g, StringConfiguration c, PotentialModel mod)
        : grid(std::move(g)), cfg(std::move(c)), model(mod), v(grid.size(), 0.0)
    {
    }

    Grid grid;
    StringConfiguration cfg;
    PotentialModel model;
    double delta = 0.0;
    std::vector<double> v;

    double residual_norm = 0.0;
    int iterations = 0;

    // Bracket bookkeeping over the whole iteration history.
    bool bracket_enforced = false;
    double iterate_min = 0.0;              // min of v over all iterates and nodes
    double iterate_max_above_super = 0.0;  // max of v + u0^delta (should stay <= 0)

    // Monotone trace: descending = started from the supersolution.
    bool descending = true;
    double monotone_violation = 0.0;       // largest wrong-direction nodal step
    std::vector<double> step_diffs;        // sup-norm of successive iterate differences
};

struct SubsolutionReport {
    bool pass = false;
    bool trivial = false;      // N = 0: nothing to check
    double worst_value = 0.0;  // max over nodes of rhs(v = 0); pass iff < 0
    Point2 worst_node;
    double required_g0 = 0.0;  // minimal g0 for which the inequality holds on the grid
    double growth_factor = 0.0; // required_g0 / model.g0
};

struct SolveOptions {
    double tol = 1e-8;
    int max_iterations = 500;
    // When true, a failing subsolution check aborts the solve. When false the
    // monotone descent still runs from the supersolution, but the lower
    // bracket v >= 0 is not guaranteed (used by the flat-vortex path, where
    // the physical solution dips below the background near the center).
    bool require_subsolution = true;
    // Largest nodes-per-axis handled by the direct sparse factorization;
    // larger grids use preconditioned conjugate gradients.
    int direct_solver_limit = 513;
};

// Full right-hand side of the regularized equation at one point:
//   rhs = g0 e^{a(u0^d+v) - (a/m) e^{m(u0^d+v)}} (e^{m(u0^d+v)} - 1) F_delta(x) + g(x),
// evaluated through the cancellation e^{a u0^d} F_delta = e^{-a w0}, which
// stays finite for all delta >= 0 including at the centers.
double rhs_eval(const PotentialModel& model, const StringConfiguration& cfg,
                const RegularizationParam& reg, double v_value, const Point2& x);

// Evaluates rhs(v=0) at every grid node. pass means the strict inequality
// rhs < 0 holds everywhere (v = 0 is a grid subsolution); on failure
// required_g0 reports the minimal coupling that restores it.
SubsolutionReport check_subsolution(const PotentialModel& model,
                                    const StringConfiguration& cfg,
                                    const RegularizationParam& reg, const Grid& grid);

// Monotone iteration from the supersolution -u0^delta with Dirichlet v = 0
// on the truncation boundary. Each step solves the sparse SPD system
// (K(x) - lap_h) v_{k+1} = K(x) v_k - rhs(v_k) with the nodal constant
// K(x) = F_delta(x) * g0 m e^{-a/m}, the supremum of d(rhs)/dv over the
// bracket, which keeps the iteration order preserving.
PlanarField solve_regularized(const PotentialModel& model, const StringConfiguration& cfg,
                              const RegularizationParam& reg, const Grid& grid,
                              const SolveOptions& opts = {});

struct ContinuationStage {
    double delta = 0.0;
    int iterations = 0;
    double residual = 0.0;
    bool subsolution_pass = false;
    bool descending = true;
    double monotone_violation = 0.0;
    double iterate_min = 0.0;
    double iterate_max_above_super = 0.0;
    double final_min = 0.0;              // min of the stage solution
    double final_max_above_super = 0.0;  // max of v + u0^delta of the stage solution
};

struct ContinuationResult {
    ContinuationResult(PlanarField f) : field(std::move(f)) {}
    PlanarField field;                 // solution at the last delta stage
    std::vector<ContinuationStage> stages;
    std::vector<double> cauchy_diffs;  // sup|v^{delta_k} - v^{delta_{k+1}}|
};

// Geometric default schedule delta_k = 2^-(k+1), k = 0..19.
std::vector<double> default_delta_schedule();

// Solves along a strictly decreasing delta schedule. The first stage runs
// the descending iteration from its supersolution; later stages warm-start
// from the previous solution, which enters the new stage from below and
// ascends (rhs is monotone in delta at fixed v).
ContinuationResult continue_delta(const PotentialModel& model, const StringConfiguration& cfg,
                                  const Grid& grid, const std::vector<double>& schedule,
                                  const SolveOptions& opts = {});

// Max over interior nodes of |lap_h(v) - rhs(v, x)| at the field's delta.
double residual(const PotentialModel& model, const StringConfiguration& cfg,
                const PlanarField& field);

} // namespace sds

#endif
