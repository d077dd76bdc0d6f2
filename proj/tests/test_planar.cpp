#include "sds/planar.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace sds;

namespace {

std::vector<double> geometric_schedule(int stages)
{
    std::vector<double> s;
    for (int k = 0; k < stages; ++k)
        s.push_back(std::ldexp(1.0, -(k + 1)));
    return s;
}

} // namespace

TEST_CASE("grid construction, offsets, validation")
{
    StringConfiguration two({{{1.0, 0.0}, 1}, {{-1.0, 0.0}, 1}});
    CHECK_THROWS_AS(Grid(1.5, 65, two), domain_error); // centers outside R/2
    CHECK_THROWS_AS(Grid(8.0, 2, two), domain_error);

    // center (1, 0) lands on a node of the 17-node grid on [-8, 8]
    Grid shifted(8.0, 17, two);
    CHECK(shifted.spacing() == doctest::Approx(1.0));
    CHECK(shifted.offset_x() == doctest::Approx(0.5));
    for (const auto& c : two.centers()) {
        double best = 1e300;
        for (int j = 0; j < shifted.n(); ++j)
            for (int i = 0; i < shifted.n(); ++i)
                best = std::min(best, dist2(c.position, shifted.node(i, j)));
        CHECK(std::sqrt(best) > 1e-9);
    }

    // mid-cell centers need no shift
    StringConfiguration mid({{{0.96875, 0.0}, 1}});
    Grid plain(8.0, 97, mid);
    CHECK(plain.offset_x() == 0.0);
    CHECK(plain.node(48, 48).x == doctest::Approx(0.0));
    CHECK(plain.on_boundary(0, 5));
    CHECK_FALSE(plain.on_boundary(5, 5));
}

TEST_CASE("rhs trivial cases")
{
    const PotentialModel mod{2, 1.0, 0.25, 3.0};
    const StringConfiguration empty;
    const RegularizationParam reg(0.5);
    CHECK(rhs_eval(mod, empty, reg, 0.0, {1.0, 2.0}) == 0.0);

    StringConfiguration two({{{0.9, 0.0}, 1}, {{-0.9, 0.0}, 1}});
    for (const Point2 x : {Point2{0.4, 0.3}, Point2{-2.0, 1.0}, Point2{5.0, 5.0}}) {
        // v = -u0^delta collapses the exponent: rhs = g > 0
        const double vtop = -u0_delta_eval(two, reg, x);
        CHECK(rhs_eval(mod, two, reg, vtop, x) ==
              doctest::Approx(source_g_eval(two, x)).epsilon(1e-12));
        // v = 0: nonlinear term is negative
        CHECK(rhs_eval(mod, two, reg, 0.0, x) < source_g_eval(two, x));
    }
    CHECK_THROWS_AS(rhs_eval(mod, two, reg, std::nan(""), {0.0, 0.0}), domain_error);

    // a = 0: the right-hand side at v = 0 collapses to g0 (e^{m u0^d} - 1) + g
    const PotentialModel flat{1, 1.0, 0.0, 1.0};
    const StringConfiguration one = StringConfiguration::coincident(1);
    for (const Point2 x : {Point2{0.0, 0.0}, Point2{1.5, -0.5}, Point2{4.0, 4.0}}) {
        const double expected =
            flat.g0 * std::expm1(u0_delta_eval(one, reg, x)) + source_g_eval(one, x);
        CHECK(rhs_eval(flat, one, reg, 0.0, x) ==
              doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("subsolution check: growth factor and limits")
{
    StringConfiguration two({{{0.9, 0.1}, 1}, {{-0.9, -0.1}, 1}});
    const RegularizationParam reg(0.5);
    Grid grid(8.0, 65, two);

    PotentialModel mod{2, 1.0, 0.25, 1.0};
    const SubsolutionReport small = check_subsolution(mod, two, reg, grid);
    CHECK_FALSE(small.pass);
    CHECK(small.worst_value > 0.0);
    CHECK(small.required_g0 > 1.0);

    mod.g0 = small.required_g0 * 1.25;
    const SubsolutionReport scaled = check_subsolution(mod, two, reg, grid);
    CHECK(scaled.pass);
    CHECK(scaled.growth_factor < 1.0);

    mod.g0 = 1e9; // g0 -> infinity: the negative term dominates
    CHECK(check_subsolution(mod, two, reg, grid).pass);

    mod.g0 = 1e-12; // g0 -> 0+: rhs -> g > 0 everywhere
    const SubsolutionReport tiny = check_subsolution(mod, two, reg, grid);
    CHECK_FALSE(tiny.pass);
    CHECK(tiny.worst_value > 0.5); // close to the peak of g near a center

    // trivial configuration
    const SubsolutionReport triv =
        check_subsolution({0, 1.0, 0.0, 1.0}, StringConfiguration{}, reg, grid);
    CHECK(triv.pass);
    CHECK(triv.trivial);
}

TEST_CASE("N = 0 solves to the zero field")
{
    const PotentialModel mod{0, 1.0, 0.0, 1.0};
    const StringConfiguration empty;
    Grid grid(8.0, 33, empty);
    const PlanarField field = solve_regularized(mod, empty, RegularizationParam(0.5), grid);
    for (double v : field.v)
        CHECK(v == 0.0);
    CHECK(field.residual_norm == 0.0);
    CHECK(field.iterations == 0);
    CHECK(residual(mod, empty, field) == 0.0);

    const ContinuationResult cont =
        continue_delta(mod, empty, grid, geometric_schedule(5));
    CHECK(cont.field.delta == doctest::Approx(std::ldexp(1.0, -5)));
    for (double c : cont.cauchy_diffs)
        CHECK(c == 0.0);
}

TEST_CASE("degenerate schedule equals a single regularized solve")
{
    StringConfiguration two({{{0.9, 0.1}, 1}, {{-0.9, -0.1}, 1}});
    Grid grid(8.0, 49, two);
    const RegularizationParam reg(0.5);
    PotentialModel mod{2, 1.0, 0.25, 1.0};
    mod.g0 = check_subsolution(mod, two, reg, grid).required_g0 * 1.25;

    const PlanarField direct = solve_regularized(mod, two, reg, grid);
    const ContinuationResult cont = continue_delta(mod, two, grid, {0.5});
    REQUIRE(cont.stages.size() == 1);
    for (std::size_t k = 0; k < direct.v.size(); ++k)
        CHECK(cont.field.v[k] == direct.v[k]);
}

TEST_CASE("two-center bracket, monotone traces, cauchy decrease, symmetry")
{
    StringConfiguration two({{{0.96875, 0.0}, 1}, {{-0.96875, 0.0}, 1}});
    Grid grid(8.0, 97, two);
    CHECK(grid.offset_x() == 0.0);

    PotentialModel mod{2, 1.0, 0.25, 1.0};
    mod.g0 =
        check_subsolution(mod, two, RegularizationParam(0.5), grid).required_g0 * 1.25;

    SolveOptions opts;
    opts.tol = 1e-8;
    const auto schedule = geometric_schedule(10);
    const ContinuationResult cont = continue_delta(mod, two, grid, schedule, opts);

    REQUIRE(cont.stages.size() == schedule.size());
    for (std::size_t s = 0; s < cont.stages.size(); ++s) {
        const auto& st = cont.stages[s];
        CHECK(st.subsolution_pass);
        CHECK(st.final_min >= 0.0);
        CHECK(st.final_max_above_super <= 1e-10);
        CHECK(st.iterate_min >= 0.0);
        if (s == 0) {
            CHECK(st.descending);
            CHECK(st.monotone_violation == 0.0); // descent from the supersolution
        } else {
            CHECK_FALSE(st.descending);
            CHECK(st.monotone_violation <= 10 * opts.tol); // ascent from below
        }
    }

    // Cauchy differences decrease along the schedule
    REQUIRE(cont.cauchy_diffs.size() == schedule.size() - 1);
    for (std::size_t k = 1; k < cont.cauchy_diffs.size(); ++k)
        CHECK(cont.cauchy_diffs[k] < cont.cauchy_diffs[k - 1]);

    // final field sits below the unregularized barrier -u0
    double above0 = -1e300;
    for (int j = 0; j < grid.n(); ++j)
        for (int i = 0; i < grid.n(); ++i)
            above0 = std::max(above0, cont.field.v[grid.index(i, j)] +
                                          u0_eval(two, grid.node(i, j)));
    CHECK(above0 <= 0.0);

    // stage-0 sup differences are non-increasing after the first step
    const PlanarField first =
        solve_regularized(mod, two, RegularizationParam(0.5), grid, opts);
    for (std::size_t k = 2; k < first.step_diffs.size(); ++k)
        CHECK(first.step_diffs[k] <= first.step_diffs[k - 1] * (1.0 + 1e-9));
    CHECK(first.descending);
    CHECK(first.monotone_violation == 0.0);
    CHECK(first.bracket_enforced);

    // reflection symmetry about the y axis within 10x solver tolerance
    double asym = 0.0;
    for (int j = 0; j < grid.n(); ++j)
        for (int i = 0; i < grid.n(); ++i)
            asym = std::max(asym, std::abs(cont.field.v[grid.index(i, j)] -
                                           cont.field.v[grid.index(grid.n() - 1 - i, j)]));
    CHECK(asym <= 10 * opts.tol);

    CHECK(residual(mod, two, cont.field) <= opts.tol);
}

TEST_CASE("coincident centers give a radially symmetric field")
{
    const StringConfiguration cfg = StringConfiguration::coincident(2);
    Grid grid(8.0, 96, cfg); // even n: origin between nodes, no offset needed
    CHECK(grid.offset_x() == 0.0);

    PotentialModel mod{2, 1.0, 0.2, 1.0};
    mod.g0 =
        check_subsolution(mod, cfg, RegularizationParam(0.5), grid).required_g0 * 1.25;
    SolveOptions opts;
    const ContinuationResult cont = continue_delta(mod, cfg, grid, geometric_schedule(8));

    // exact-radius rings: the symmetric lattice repeats |x|, |y| values, so
    // nodes with the same unordered (|x|, |y|) pair lie at exactly one radius
    std::map<std::pair<double, double>, std::pair<double, double>> rings;
    for (int j = 0; j < grid.n(); ++j) {
        for (int i = 0; i < grid.n(); ++i) {
            const Point2 p = grid.node(i, j);
            const std::pair<double, double> key{std::min(std::abs(p.x), std::abs(p.y)),
                                                std::max(std::abs(p.x), std::abs(p.y))};
            const double v = cont.field.v[grid.index(i, j)];
            auto it = rings.find(key);
            if (it == rings.end())
                rings[key] = {v, v};
            else {
                it->second.first = std::min(it->second.first, v);
                it->second.second = std::max(it->second.second, v);
            }
        }
    }
    double worst = 0.0;
    for (const auto& [key, mm] : rings)
        worst = std::max(worst, mm.second - mm.first);
    CHECK(worst <= 10 * opts.tol);
}

TEST_CASE("flat vortex matches the shooting oracle")
{
    const StringConfiguration cfg = StringConfiguration::coincident(1);
    Grid grid(10.0, 129, cfg); // origin is a node: grid shifts by h/2
    CHECK(grid.offset_x() == doctest::Approx(grid.spacing() / 2));

    const PotentialModel mod{1, 1.0, 0.0, 1.0};
    SolveOptions opts;
    opts.require_subsolution = false; // v dips below 0 near the center at g0 = 1
    const ContinuationResult cont =
        continue_delta(mod, cfg, grid, geometric_schedule(16), opts);
    CHECK_FALSE(cont.field.bracket_enforced);

    const oracles::FlatVortexOracle oracle(1, 1.0, 1.0, 1.5 * grid.radius());
    double sup = 0.0;
    for (int j = 1; j < grid.n() - 1; ++j) {
        for (int i = 1; i < grid.n() - 1; ++i) {
            const Point2 p = grid.node(i, j);
            const double r = std::hypot(p.x, p.y);
            const double v_oracle =
                oracle.u(r) - u0_eval(cfg, p); // v = u - u0, smooth through 0
            sup = std::max(sup, std::abs(cont.field.v[grid.index(i, j)] - v_oracle));
        }
    }
    const double h = grid.spacing();
    CHECK(sup <= 5.0 * h * h);

    // the true flat-vortex v is negative near the center (g0 = 1 < C0)
    double minv = 0.0;
    for (double v : cont.field.v)
        minv = std::min(minv, v);
    CHECK(minv < -0.5);
}

TEST_CASE("grid refinement is second order")
{
    // single regularized stage on nested grids; the off-lattice center avoids
    // collisions so all three grids share nodes
    const StringConfiguration cfg = StringConfiguration::coincident(1, {0.123, 0.271});
    const PotentialModel mod{1, 1.0, 0.0, 6.0}; // g0 above the subsolution threshold
    const RegularizationParam reg(0.25);

    std::vector<int> sizes{49, 97, 193};
    std::vector<PlanarField> fields;
    for (int n : sizes)
        fields.push_back(
            solve_regularized(mod, cfg, reg, Grid(10.0, n, cfg), SolveOptions{}));

    auto nested_diff = [&](const PlanarField& coarse, const PlanarField& fine) {
        double worst = 0.0;
        const int nc = coarse.grid.n();
        for (int j = 0; j < nc; ++j)
            for (int i = 0; i < nc; ++i)
                worst = std::max(worst,
                                 std::abs(coarse.v[coarse.grid.index(i, j)] -
                                          fine.v[fine.grid.index(2 * i, 2 * j)]));
        return worst;
    };
    const double d01 = nested_diff(fields[0], fields[1]);
    const double d12 = nested_diff(fields[1], fields[2]);
    CHECK(d01 / d12 > 3.0); // second-order scheme: ratio near 4
    CHECK(d01 / d12 < 5.5);
}

TEST_CASE("iterative linear path matches the direct factorization")
{
    StringConfiguration cfg({{{0.9, 0.1}, 1}});
    Grid grid(8.0, 65, cfg);
    PotentialModel mod{1, 1.0, 0.25, 1.0};
    mod.g0 =
        check_subsolution(mod, cfg, RegularizationParam(0.5), grid).required_g0 * 1.25;

    SolveOptions direct;
    SolveOptions iterative;
    iterative.direct_solver_limit = 0; // route through preconditioned CG
    const PlanarField fd = solve_regularized(mod, cfg, RegularizationParam(0.5), grid, direct);
    const PlanarField fi =
        solve_regularized(mod, cfg, RegularizationParam(0.5), grid, iterative);
    double worst = 0.0;
    for (std::size_t k = 0; k < fd.v.size(); ++k)
        worst = std::max(worst, std::abs(fd.v[k] - fi.v[k]));
    CHECK(worst <= 10 * direct.tol);
    CHECK(fi.residual_norm <= iterative.tol);
}

TEST_CASE("residual responds to a point perturbation by 0.4/h^2")
{
    StringConfiguration cfg({{{0.9, 0.1}, 1}});
    Grid grid(8.0, 161, cfg); // h = 0.1: the stencil term dominates the rhs shift
    PotentialModel mod{1, 1.0, 0.25, 1.0};
    mod.g0 =
        check_subsolution(mod, cfg, RegularizationParam(0.5), grid).required_g0 * 1.25;
    PlanarField field = solve_regularized(mod, cfg, RegularizationParam(0.5), grid);

    const double h = grid.spacing();
    field.v[grid.index(80, 80)] += 0.1;
    const double jump = residual(mod, cfg, field);
    CHECK(jump == doctest::Approx(0.4 / (h * h)).epsilon(0.05));
}

TEST_CASE("solver validation and refusal paths")
{
    StringConfiguration two({{{0.9, 0.1}, 1}, {{-0.9, -0.1}, 1}});
    Grid grid(8.0, 33, two);
    PotentialModel mod{2, 1.0, 0.25, 1e-6}; // far below the subsolution threshold

    CHECK_THROWS_AS(solve_regularized(mod, two, RegularizationParam(0.5), grid),
                    regime_error);
    CHECK_THROWS_AS(solve_regularized(mod, two, RegularizationParam(0.0), grid),
                    domain_error);
    CHECK_THROWS_AS(continue_delta(mod, two, grid, {0.5, 0.5}), domain_error);
    CHECK_THROWS_AS(continue_delta(mod, two, grid, {}), domain_error);
    CHECK_THROWS_AS(continue_delta(mod, two, grid, {0.25, 0.5}), domain_error);

    // the critical-coupling single-site case belongs to the radial reduction
    const StringConfiguration fused = StringConfiguration::coincident(2, {0.25, 0.25});
    Grid fgrid(8.0, 33, fused);
    const PotentialModel crit{2, 1.0, 0.5, 10.0};
    CHECK_THROWS_AS(solve_regularized(crit, fused, RegularizationParam(0.5), fgrid),
                    regime_error);
    CHECK_THROWS_AS(continue_delta(crit, fused, fgrid, {0.5}), regime_error);
}
