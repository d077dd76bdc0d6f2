#include "sds/planar.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace sds {

namespace {

// Stable core of the right-hand side. c1 = g0 e^{-a w0(x)} carries the
// cancellation e^{a u0^d} F_delta = e^{-a w0}.
inline double rhs_core(const PotentialModel& mod, double c1, double u0d, double gsrc,
                       double v)
{
    const double U = u0d + v;
    const double mU = mod.m * U;
    if (mU > 700.0) {
        if (mod.a <= 0.0)
            return mod.g0 * std::expm1(mU) + gsrc; // flat case saturates
        return gsrc; // double exponential suppresses the nonlinearity
    }
    const double emU = std::exp(mU);
    return c1 * std::exp(mod.a * v - (mod.a / mod.m) * emU) * std::expm1(mU) + gsrc;
}

struct Workspace {
    const Grid* grid = nullptr;
    int n = 0;
    double h = 0.0;
    std::vector<double> u0d;   // u0^delta per node
    std::vector<double> c1;    // g0 e^{-a w0}
    std::vector<double> gsrc;  // source g
    std::vector<double> Kdiag; // nodal splitting constant
};

Workspace make_workspace(const PotentialModel& model, const StringConfiguration& cfg,
                         const RegularizationParam& reg, const Grid& grid)
{
    Workspace ws;
    ws.grid = &grid;
    ws.n = grid.n();
    ws.h = grid.spacing();
    const std::size_t total = grid.size();
    ws.u0d.resize(total);
    ws.c1.resize(total);
    ws.gsrc.resize(total);
    ws.Kdiag.resize(total);
    // sup over the bracket U in [u0^delta, 0] of h'(U) is attained at U = 0
    const double hp0 = model.g0 * model.m * std::exp(-model.a / model.m);
    for (int j = 0; j < ws.n; ++j) {
        for (int i = 0; i < ws.n; ++i) {
            const Point2 p = grid.node(i, j);
            const std::size_t k = grid.index(i, j);
            const double w0v = w0_eval(cfg, p);
            ws.u0d[k] = u0_delta_eval(cfg, reg, p);
            ws.c1[k] = model.g0 * std::exp(-model.a * w0v);
            ws.gsrc[k] = source_g_eval(cfg, p);
            // F_delta expressed as e^{-a (w0 + u0^delta)}
            ws.Kdiag[k] = hp0 * std::exp(-model.a * (w0v + ws.u0d[k]));
        }
    }
    return ws;
}

// One factorized linear operator (K - lap_h) on the interior nodes.
class StageSolver {
public:
    StageSolver(const Workspace& ws, int direct_limit)
        : n_(ws.n), ni_(ws.n - 2), h2inv_(1.0 / (ws.h * ws.h))
    {
        const int m = ni_ * ni_;
        // the iterative solver keeps a reference to the matrix; it must
        // outlive compute()
        Eigen::SparseMatrix<double>& A = A_;
        A.resize(m, m);
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<std::size_t>(5) * m);
        for (int j = 1; j <= ni_; ++j) {
            for (int i = 1; i <= ni_; ++i) {
                const int row = lin(i, j);
                trips.emplace_back(row, row,
                                   4.0 * h2inv_ + ws.Kdiag[ws.grid->index(i, j)]);
                if (i > 1)
                    trips.emplace_back(row, lin(i - 1, j), -h2inv_);
                if (i < ni_)
                    trips.emplace_back(row, lin(i + 1, j), -h2inv_);
                if (j > 1)
                    trips.emplace_back(row, lin(i, j - 1), -h2inv_);
                if (j < ni_)
                    trips.emplace_back(row, lin(i, j + 1), -h2inv_);
            }
        }
        A.setFromTriplets(trips.begin(), trips.end());
        A.makeCompressed();
        if (n_ <= direct_limit) {
            direct_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
            direct_->compute(A);
            if (direct_->info() != Eigen::Success)
                throw numeric_error("planar solve: sparse factorization failed");
        } else {
            cg_ = std::make_unique<Eigen::ConjugateGradient<
                Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                Eigen::IncompleteCholesky<double>>>();
            cg_->setTolerance(1e-13);
            cg_->setMaxIterations(20000);
            cg_->compute(A);
            if (cg_->info() != Eigen::Success)
                throw numeric_error("planar solve: CG preconditioner setup failed");
        }
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b, const Eigen::VectorXd& guess) const
    {
        if (direct_)
            return direct_->solve(b);
        Eigen::VectorXd x = cg_->solveWithGuess(b, guess);
        if (cg_->info() != Eigen::Success)
            throw numeric_error("planar solve: CG did not converge");
        return x;
    }

    int lin(int i, int j) const { return (j - 1) * ni_ + (i - 1); }

private:
    int n_, ni_;
    double h2inv_;
    Eigen::SparseMatrix<double> A_;
    std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> direct_;
    std::unique_ptr<Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                                             Eigen::Lower | Eigen::Upper,
                                             Eigen::IncompleteCholesky<double>>>
        cg_;
};

double max_residual(const PotentialModel& model, const Workspace& ws,
                    const std::vector<double>& v)
{
    const Grid& grid = *ws.grid;
    const int n = ws.n;
    const double h2inv = 1.0 / (ws.h * ws.h);
    double worst = 0.0;
    for (int j = 1; j < n - 1; ++j) {
        for (int i = 1; i < n - 1; ++i) {
            const std::size_t k = grid.index(i, j);
            const double lap = (v[grid.index(i - 1, j)] + v[grid.index(i + 1, j)] +
                                v[grid.index(i, j - 1)] + v[grid.index(i, j + 1)] -
                                4.0 * v[k]) *
                               h2inv;
            const double r = lap - rhs_core(model, ws.c1[k], ws.u0d[k], ws.gsrc[k], v[k]);
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

// Shared monotone iteration. start holds the initial iterate (full grid,
// boundary zeros are imposed); descending selects the expected direction.
void iterate_monotone(const PotentialModel& model, const Workspace& ws,
                      const StageSolver& solver, const SolveOptions& opts,
                      bool descending, bool enforce_bracket, PlanarField& field,
                      std::vector<double> start)
{
    const Grid& grid = *ws.grid;
    const int n = ws.n;
    const int ni = n - 2;
    const int m = ni * ni;

    std::vector<double>& v = field.v;
    v = std::move(start);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (grid.on_boundary(i, j))
                v[grid.index(i, j)] = 0.0;

    const double bracket_scale = [&] {
        double s = 1.0;
        for (double u : ws.u0d)
            s = std::max(s, std::abs(u));
        return s;
    }();
    const double bracket_slack = 1e-10 * bracket_scale;

    field.descending = descending;
    field.monotone_violation = 0.0;
    field.iterate_min = 0.0;
    field.iterate_max_above_super = -std::numeric_limits<double>::infinity();
    field.step_diffs.clear();

    Eigen::VectorXd b(m), x(m), guess(m);
    for (int j = 1; j <= ni; ++j)
        for (int i = 1; i <= ni; ++i)
            guess[solver.lin(i, j)] = v[grid.index(i, j)];

    int iter = 0;
    double res = std::numeric_limits<double>::infinity();
    for (; iter < opts.max_iterations; ++iter) {
        for (int j = 1; j <= ni; ++j) {
            for (int i = 1; i <= ni; ++i) {
                const std::size_t k = grid.index(i, j);
                const double r = rhs_core(model, ws.c1[k], ws.u0d[k], ws.gsrc[k], v[k]);
                if (!std::isfinite(r)) {
                    std::ostringstream msg;
                    msg << "planar solve: non-finite rhs at node (" << grid.x(i) << ", "
                        << grid.y(j) << ")";
                    throw numeric_error(msg.str());
                }
                b[solver.lin(i, j)] = ws.Kdiag[k] * v[k] - r;
            }
        }
        x = solver.solve(b, guess);
        guess = x;

        double diff = 0.0;
        for (int j = 1; j <= ni; ++j) {
            for (int i = 1; i <= ni; ++i) {
                const std::size_t k = grid.index(i, j);
                const double nv = x[solver.lin(i, j)];
                if (!std::isfinite(nv))
                    throw numeric_error("planar solve: non-finite iterate");
                const double step = nv - v[k];
                diff = std::max(diff, std::abs(step));
                const double wrong = descending ? step : -step;
                field.monotone_violation = std::max(field.monotone_violation, wrong);
                field.iterate_min = std::min(field.iterate_min, nv);
                field.iterate_max_above_super =
                    std::max(field.iterate_max_above_super, nv + ws.u0d[k]);
                v[k] = nv;
            }
        }
        field.step_diffs.push_back(diff);

        if (enforce_bracket &&
            (field.iterate_min < -bracket_slack ||
             field.iterate_max_above_super > bracket_slack)) {
            std::ostringstream msg;
            msg << "planar solve: iterate left the bracket [0, -u0^delta] "
                << "(min v = " << field.iterate_min
                << ", max v + u0^delta = " << field.iterate_max_above_super
                << "); either the splitting constant is too small or the "
                << "regularization scale sqrt(delta) is unresolved by the grid";
            throw numeric_error(msg.str());
        }

        res = max_residual(model, ws, v);
        if (diff <= opts.tol && res <= opts.tol) {
            ++iter;
            break;
        }
    }
    field.iterations = iter;
    field.residual_norm = res;
    if (res > opts.tol) {
        std::ostringstream msg;
        msg << "planar solve: no convergence in " << opts.max_iterations
            << " iterations (residual " << res << ", tol " << opts.tol
            << "); last sup-diffs:";
        const std::size_t tail = std::min<std::size_t>(5, field.step_diffs.size());
        for (std::size_t s = field.step_diffs.size() - tail; s < field.step_diffs.size(); ++s)
            msg << " " << field.step_diffs[s];
        throw convergence_error(msg.str());
    }
}

PlanarField trivial_field(const PotentialModel& model, const StringConfiguration& cfg,
                          const Grid& grid, double delta)
{
    PlanarField field(grid, cfg, model);
    field.delta = delta;
    field.bracket_enforced = true;
    field.residual_norm = 0.0;
    field.iterations = 0;
    return field;
}

void validate_schedule(const std::vector<double>& schedule)
{
    if (schedule.empty())
        throw domain_error("continue_delta: schedule must be nonempty");
    double prev = 1.0;
    for (double d : schedule) {
        if (!(d > 0.0) || !(d < 1.0))
            throw domain_error("continue_delta: schedule entries must lie in (0, 1)");
        if (!(d < prev))
            throw domain_error("continue_delta: schedule must be strictly decreasing");
        prev = d;
    }
}

} // namespace

double rhs_eval(const PotentialModel& model, const StringConfiguration& cfg,
                const RegularizationParam& reg, double v_value, const Point2& x)
{
    if (!std::isfinite(v_value))
        throw domain_error("rhs_eval: v must be finite");
    const double u0d = u0_delta_eval(cfg, reg, x);
    const double gsrc = source_g_eval(cfg, x);
    const double U = u0d + v_value;
    const double mU = model.m * U;
    double out;
    if (mU > 700.0) {
        out = h_eval(model, U) * F_delta_eval(cfg, reg, model.a, x) + gsrc;
    } else {
        const double c1 = model.g0 * std::exp(-model.a * w0_eval(cfg, x));
        out = rhs_core(model, c1, u0d, gsrc, v_value);
    }
    if (!std::isfinite(out)) {
        std::ostringstream msg;
        msg << "rhs_eval: non-finite value at (" << x.x << ", " << x.y << ")";
        throw numeric_error(msg.str());
    }
    return out;
}

SubsolutionReport check_subsolution(const PotentialModel& model,
                                    const StringConfiguration& cfg,
                                    const RegularizationParam& reg, const Grid& grid)
{
    validate_model(model);
    SubsolutionReport rep;
    if (cfg.total_number() == 0) {
        // rhs(0) vanishes identically; the equation is already solved by v = 0
        rep.pass = true;
        rep.trivial = true;
        rep.required_g0 = 0.0;
        rep.growth_factor = 0.0;
        return rep;
    }
    rep.worst_value = -std::numeric_limits<double>::infinity();
    double required = 0.0;
    const int n = grid.n();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Point2 p = grid.node(i, j);
            const double u0d = u0_delta_eval(cfg, reg, p);
            const double w0v = w0_eval(cfg, p);
            const double gsrc = source_g_eval(cfg, p);
            const double mU = model.m * u0d;
            // nonlinearity at v = 0 per unit g0; strictly negative for N >= 1
            const double q_unit =
                std::exp(-model.a * w0v - (model.a / model.m) * std::exp(mU)) *
                std::expm1(mU);
            const double value = model.g0 * q_unit + gsrc;
            if (value > rep.worst_value) {
                rep.worst_value = value;
                rep.worst_node = p;
            }
            if (q_unit < 0.0)
                required = std::max(required, gsrc / (-q_unit));
        }
    }
    rep.pass = rep.worst_value < 0.0;
    rep.required_g0 = required;
    rep.growth_factor = required / model.g0;
    return rep;
}

std::vector<double> default_delta_schedule()
{
    std::vector<double> s;
    for (int k = 0; k <= 19; ++k)
        s.push_back(std::ldexp(1.0, -(k + 1)));
    return s;
}

PlanarField solve_regularized(const PotentialModel& model, const StringConfiguration& cfg,
                              const RegularizationParam& reg, const Grid& grid,
                              const SolveOptions& opts)
{
    validate_model(model);
    if (!(reg.delta > 0.0))
        throw domain_error("solve_regularized: delta must be positive");
    if (cfg.total_number() == 0)
        return trivial_field(model, cfg, grid, reg.delta);
    if (critical_coupling(model, 1e-9) && cfg.single_site())
        throw regime_error("solve_regularized: critical coupling with a single merged "
                           "center; use the radial reduction");

    const SubsolutionReport sub = check_subsolution(model, cfg, reg, grid);
    if (!sub.pass && opts.require_subsolution) {
        std::ostringstream msg;
        msg << "solve_regularized: v = 0 is not a subsolution at g0 = " << model.g0
            << " (worst rhs(0) = " << sub.worst_value << "); grow g0 by factor "
            << sub.growth_factor;
        throw regime_error(msg.str());
    }

    Workspace ws = make_workspace(model, cfg, reg, grid);
    StageSolver solver(ws, opts.direct_solver_limit);
    PlanarField field(grid, cfg, model);
    field.delta = reg.delta;
    field.bracket_enforced = sub.pass;
    std::vector<double> start(grid.size());
    for (std::size_t k = 0; k < start.size(); ++k)
        start[k] = -ws.u0d[k];
    iterate_monotone(model, ws, solver, opts, /*descending=*/true, sub.pass, field,
                     std::move(start));
    return field;
}

ContinuationResult continue_delta(const PotentialModel& model,
                                  const StringConfiguration& cfg, const Grid& grid,
                                  const std::vector<double>& schedule,
                                  const SolveOptions& opts)
{
    validate_model(model);
    validate_schedule(schedule);
    if (cfg.total_number() >= 1 && critical_coupling(model, 1e-9) && cfg.single_site())
        throw regime_error("continue_delta: critical coupling with a single merged "
                           "center; use the radial reduction");
    if (cfg.total_number() == 0) {
        ContinuationResult out(trivial_field(model, cfg, grid, schedule.back()));
        for (double d : schedule) {
            ContinuationStage st;
            st.delta = d;
            st.subsolution_pass = true;
            out.stages.push_back(st);
            if (out.stages.size() > 1)
                out.cauchy_diffs.push_back(0.0);
        }
        return out;
    }

    // The subsolution requirement is tightest at the largest delta; verified
    // per stage anyway and recorded.
    ContinuationResult out(PlanarField(grid, cfg, model));
    std::vector<double> prev;
    bool all_pass = true;
    for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
        const RegularizationParam reg(schedule[stage]);
        const SubsolutionReport sub = check_subsolution(model, cfg, reg, grid);
        if (stage == 0 && !sub.pass && opts.require_subsolution) {
            std::ostringstream msg;
            msg << "continue_delta: v = 0 is not a subsolution at g0 = " << model.g0
                << " for delta = " << reg.delta << "; grow g0 by factor "
                << sub.growth_factor;
            throw regime_error(msg.str());
        }
        all_pass = all_pass && sub.pass;

        Workspace ws = make_workspace(model, cfg, reg, grid);
        StageSolver solver(ws, opts.direct_solver_limit);
        PlanarField field(grid, cfg, model);
        field.delta = reg.delta;
        field.bracket_enforced = all_pass;

        std::vector<double> start;
        bool descending;
        if (stage == 0) {
            start.resize(grid.size());
            for (std::size_t k = 0; k < start.size(); ++k)
                start[k] = -ws.u0d[k];
            descending = true;
        } else {
            start = prev;
            descending = false; // warm start enters the new stage from below
        }
        try {
            iterate_monotone(model, ws, solver, opts, descending, all_pass, field,
                             std::move(start));
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "continue_delta: stage " << stage << " (delta = " << reg.delta
                << ") failed: " << e.what();
            throw convergence_error(msg.str());
        }

        ContinuationStage st;
        st.delta = reg.delta;
        st.iterations = field.iterations;
        st.residual = field.residual_norm;
        st.subsolution_pass = sub.pass;
        st.descending = descending;
        st.monotone_violation = field.monotone_violation;
        st.iterate_min = field.iterate_min;
        st.iterate_max_above_super = field.iterate_max_above_super;
        st.final_min = *std::min_element(field.v.begin(), field.v.end());
        double above = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < field.v.size(); ++k)
            above = std::max(above, field.v[k] + ws.u0d[k]);
        st.final_max_above_super = above;
        out.stages.push_back(st);

        if (stage > 0) {
            double cauchy = 0.0;
            for (std::size_t k = 0; k < field.v.size(); ++k)
                cauchy = std::max(cauchy, std::abs(field.v[k] - prev[k]));
            out.cauchy_diffs.push_back(cauchy);
        }
        prev = field.v;
        out.field = std::move(field);
    }
    return out;
}

double residual(const PotentialModel& model, const StringConfiguration& cfg,
                const PlanarField& field)
{
    const RegularizationParam reg(field.delta);
    Workspace ws = make_workspace(model, cfg, reg, field.grid);
    return max_residual(model, ws, field.v);
}

} // namespace sds
