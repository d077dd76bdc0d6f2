#include "sds/commands.hpp"

#include "sds/observables.hpp"
#include "sds/output.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <sstream>

namespace sds {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCriticalTol = 1e-9;

StringConfiguration build_strings(const JobConfig& cfg)
{
    if (!cfg.centers.empty())
        return StringConfiguration(cfg.centers);
    return StringConfiguration::coincident(cfg.total_N());
}

std::string artifact_prefix(const JobConfig& cfg)
{
    std::filesystem::create_directories(cfg.out_dir);
    return cfg.out_dir + "/" + cfg.basename;
}

std::string joined(const std::vector<double>& values)
{
    std::string out;
    for (double v : values)
        out += (out.empty() ? "" : " ") + fmt17(v);
    return out;
}

// ---------------------------------------------------------------- planar --

struct PlanarRun {
    PotentialModel model;
    StringConfiguration strings;
    Grid grid;
    ContinuationResult result;
    ObservableSet obs;
    ConsistencyReport consistency;
    FarFieldReport far;
    std::vector<double> schedule;
    bool g0_auto = false;
    bool subsolution_pass = false;
    double max_v_plus_u0 = 0.0; // final field against the delta = 0 bound
    double flat_rate = 0.0;     // a = 0 decay fit (0 when not applicable)
    double flat_rate_r2 = 0.0;
};

PlanarRun run_planar(const JobConfig& cfg)
{
    StringConfiguration strings = build_strings(cfg);
    const int N = strings.total_number();
    const double a = cfg.planar_a();
    if (a * N > 1.0 + 1e-12)
        throw regime_error("solve-planar: a*N > 1, outside the existence regime");
    if (N >= 1 && std::abs(a * N - 1.0) <= kCriticalTol && strings.single_site())
        throw regime_error("solve-planar: critical coupling with a single merged center; "
                           "use solve-radial");

    Grid grid(cfg.grid_R, cfg.grid_n, strings);
    std::vector<double> schedule =
        cfg.delta_schedule ? *cfg.delta_schedule : default_delta_schedule();

    PotentialModel model{N, cfg.m, a, 1.0};
    const bool g0_auto = !cfg.g0.has_value();
    if (g0_auto) {
        if (N > 0) {
            const SubsolutionReport rep = check_subsolution(
                model, strings, RegularizationParam(schedule.front()), grid);
            model.g0 = rep.required_g0 * 1.25; // strict margin over the grid minimum
        }
    } else {
        model.g0 = *cfg.g0;
    }

    SolveOptions opts;
    opts.tol = cfg.tol;
    opts.max_iterations = cfg.max_iterations;
    opts.require_subsolution = g0_auto;

    PlanarRun run{model,
                  strings,
                  grid,
                  continue_delta(model, strings, grid, schedule, opts),
                  {},
                  {},
                  {},
                  std::move(schedule),
                  g0_auto};
    run.subsolution_pass = true;
    for (const auto& st : run.result.stages)
        run.subsolution_pass = run.subsolution_pass && st.subsolution_pass;

    run.obs = compute_observables(model, strings, run.result.field);
    run.consistency = check_consistency(model, strings, grid, run.obs.u, run.obs.eta);
    if (N > 0)
        run.far = check_far_field_bounds(model, strings, grid, run.obs.u);
    else {
        run.far.u_nonpositive = true;
        run.far.all_pass = true;
    }

    double worst = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < grid.n(); ++j)
        for (int i = 0; i < grid.n(); ++i) {
            const std::size_t k = grid.index(i, j);
            worst = std::max(worst,
                             run.result.field.v[k] + u0_eval(strings, grid.node(i, j)));
        }
    run.max_v_plus_u0 = worst;

    if (a == 0.0 && N > 0) {
        const FlatDecayFit fit =
            fit_flat_decay(grid, run.obs.u, 0.3 * grid.radius(), 0.5 * grid.radius());
        run.flat_rate = fit.rate;
        run.flat_rate_r2 = fit.r_squared;
    }
    return run;
}

JobConfig resolved_planar_config(const JobConfig& cfg, const PlanarRun& run)
{
    JobConfig res = cfg;
    res.N = run.strings.total_number();
    res.a = run.model.a;
    res.g0 = run.model.g0;
    res.centers = run.strings.centers();
    res.delta_schedule = run.schedule;
    return res;
}

void write_planar_artifacts(const JobConfig& cfg, const PlanarRun& run)
{
    const std::string prefix = artifact_prefix(cfg);
    const Grid& grid = run.grid;

    CsvTable table;
    table.header = {"x", "y", "v", "u", "F12", "H", "eta", "Kg"};
    table.rows.reserve(grid.size());
    for (int j = 0; j < grid.n(); ++j) {
        for (int i = 0; i < grid.n(); ++i) {
            const Point2 p = grid.node(i, j);
            const std::size_t k = grid.index(i, j);
            table.rows.push_back({p.x, p.y, run.result.field.v[k], run.obs.u[k],
                                  run.obs.F12[k], run.obs.energy[k], run.obs.eta[k],
                                  run.obs.curvature[k]});
        }
    }
    write_csv(prefix + "_field.csv", table);
    write_text_file(prefix + "_config.cfg", serialize_config(resolved_planar_config(cfg, run)));

    const auto& stages = run.result.stages;
    int iters_total = 0;
    std::vector<double> stage_iters;
    double worst_monotone = 0.0, min_v = 0.0, max_above = -1e300;
    for (const auto& st : stages) {
        iters_total += st.iterations;
        stage_iters.push_back(st.iterations);
        worst_monotone = std::max(worst_monotone, st.monotone_violation);
        min_v = std::min(min_v, st.final_min);
        max_above = std::max(max_above, st.final_max_above_super);
    }

    Summary s;
    s.emplace_back("kind", "planar");
    s.emplace_back("N", std::to_string(run.strings.total_number()));
    s.emplace_back("a", fmt17(run.model.a));
    s.emplace_back("m", fmt17(run.model.m));
    s.emplace_back("g0", fmt17(run.model.g0));
    s.emplace_back("g0_auto", run.g0_auto ? "1" : "0");
    s.emplace_back("grid_n", std::to_string(grid.n()));
    s.emplace_back("grid_R", fmt17(grid.radius()));
    s.emplace_back("spacing", fmt17(grid.spacing()));
    s.emplace_back("tol", fmt17(cfg.tol));
    s.emplace_back("delta_final", fmt17(run.result.field.delta));
    s.emplace_back("stages", std::to_string(stages.size()));
    s.emplace_back("iterations_total", std::to_string(iters_total));
    s.emplace_back("stage_iterations", joined(stage_iters));
    s.emplace_back("residual", fmt17(run.result.field.residual_norm));
    s.emplace_back("subsolution_pass", run.subsolution_pass ? "1" : "0");
    s.emplace_back("bracket_enforced", run.result.field.bracket_enforced ? "1" : "0");
    s.emplace_back("stage0_monotone_violation",
                   fmt17(stages.empty() ? 0.0 : stages.front().monotone_violation));
    s.emplace_back("monotone_violation_max", fmt17(worst_monotone));
    s.emplace_back("min_v", fmt17(min_v));
    s.emplace_back("max_v_plus_u0delta", fmt17(max_above));
    s.emplace_back("max_v_plus_u0", fmt17(run.max_v_plus_u0));
    s.emplace_back("cauchy_diffs", joined(run.result.cauchy_diffs));
    s.emplace_back("flux_total", fmt17(run.obs.flux.total));
    s.emplace_back("flux_boundary_form", fmt17(run.obs.flux.boundary_form));
    s.emplace_back("flux_area_form", fmt17(run.obs.flux.area_form));
    s.emplace_back("flux_correction", fmt17(run.obs.flux.correction));
    s.emplace_back("flux_truncation_warning", run.obs.flux.truncation_warning ? "1" : "0");
    s.emplace_back("selfdual_max_dev", fmt17(run.consistency.max_selfdual_dev));
    s.emplace_back("einstein_max_dev", fmt17(run.consistency.max_einstein_dev));
    s.emplace_back("farfield_pass", run.far.all_pass ? "1" : "0");
    s.emplace_back("max_u", fmt17(run.far.max_u));
    if (run.model.a > 0.0 && run.strings.total_number() > 0) {
        s.emplace_back("deficit_exponent", fmt17(run.obs.deficit.exponent));
        s.emplace_back("deficit_r2", fmt17(run.obs.deficit.r_squared));
    }
    if (run.model.a == 0.0 && run.strings.total_number() > 0) {
        s.emplace_back("flat_decay_rate", fmt17(run.flat_rate));
        s.emplace_back("flat_decay_r2", fmt17(run.flat_rate_r2));
        s.emplace_back("flat_decay_theory", fmt17(flat_decay_rate(run.model)));
    }
    write_summary(prefix + "_summary.txt", s);
}

// ---------------------------------------------------------------- radial --

struct RadialRun {
    PotentialModel model;
    SeedState seed;
    RadialProfile profile;
    RadialField field;
    DecayFit fit;
    std::pair<double, double> window;
    FluxResult flux;
    FarFieldReport far;
    double ode_residual = 0.0;
    double conservation_march = 0.0;
    double conservation_all = 0.0;
    std::vector<double> fi_residual; // per sample
};

RadialRun run_radial(const JobConfig& cfg)
{
    const int N = cfg.total_N();
    if (N < 1)
        throw config_error("solve-radial: needs N >= 1 (model.N or centers)");
    StringConfiguration strings = build_strings(cfg);
    if (!strings.single_site())
        throw regime_error("solve-radial: requires coincident string centers");

    const double a = cfg.a ? *cfg.a : 1.0 / N;
    if (std::abs(a * N - 1.0) > kCriticalTol)
        throw regime_error("solve-radial: requires the critical coupling a*N = 1");

    PotentialModel model{N, cfg.m, a, 0.0};
    const double cal = calibrate_g0(N, cfg.m);
    if (cfg.g0 && std::abs(*cfg.g0 - cal) > 1e-9 * cal)
        throw regime_error("solve-radial: g0 must be the calibrated value " + fmt17(cal) +
                           " (or auto)");
    model.g0 = cal;

    RadialRun run;
    run.model = model;
    const double step = cfg.step;
    double t0;
    if (cfg.t0)
        t0 = std::round(*cfg.t0 / step) * step; // align so t = 0 is a sample
    else
        t0 = std::floor(admissible_t0(model) / step) * step;
    if (cfg.t_end <= t0 + 1.0)
        throw config_error("solve-radial: t_end must exceed t0 + 1 (t0 = " + fmt17(t0) + ")");

    run.seed = fixed_point_seed(model, t0, cfg.seed_tol, step / 4.0);
    run.profile = first_integral_march(model, run.seed, cfg.t_end, step);
    run.field = to_radial_field(run.profile);
    run.window = cfg.fit_window ? *cfg.fit_window : decay_window(run.profile);
    run.fit = extract_decay(run.profile, run.window.first, run.window.second);
    run.flux = total_flux(model, run.profile);
    run.far = check_far_field_bounds(model, run.profile);
    run.ode_residual = verify_ode_residual(model, run.profile);

    run.fi_residual.resize(run.profile.t.size());
    for (std::size_t i = 0; i < run.profile.t.size(); ++i) {
        const double res = run.profile.Uprime[i] * run.profile.Uprime[i] -
                           first_integral_eval(model, run.profile.U[i]);
        run.fi_residual[i] = res;
        run.conservation_all = std::max(run.conservation_all, std::abs(res));
        if (static_cast<int>(i) >= run.profile.seed_samples)
            run.conservation_march = std::max(run.conservation_march, std::abs(res));
    }
    return run;
}

JobConfig resolved_radial_config(const JobConfig& cfg, const RadialRun& run)
{
    JobConfig res = cfg;
    res.N = run.model.N;
    res.a = run.model.a;
    res.g0 = run.model.g0;
    res.t0 = run.seed.t0;
    res.fit_window = run.window;
    return res;
}

void write_radial_artifacts(const JobConfig& cfg, const RadialRun& run)
{
    const std::string prefix = artifact_prefix(cfg);

    CsvTable table;
    table.header = {"t", "r", "U", "Uprime", "u", "u_r", "first_integral_residual"};
    table.rows.reserve(run.profile.t.size());
    for (std::size_t i = 0; i < run.profile.t.size(); ++i)
        table.rows.push_back({run.profile.t[i], run.field.r[i], run.profile.U[i],
                              run.profile.Uprime[i], run.field.u[i], run.field.u_r[i],
                              run.fi_residual[i]});
    write_csv(prefix + "_profile.csv", table);
    write_text_file(prefix + "_config.cfg",
                    serialize_config(resolved_radial_config(cfg, run)));

    const double theory = decay_exponent(run.model.N, run.model.m);
    Summary s;
    s.emplace_back("kind", "radial");
    s.emplace_back("N", std::to_string(run.model.N));
    s.emplace_back("m", fmt17(run.model.m));
    s.emplace_back("a", fmt17(run.model.a));
    s.emplace_back("g0", fmt17(run.model.g0));
    s.emplace_back("t0", fmt17(run.seed.t0));
    s.emplace_back("t_end", fmt17(cfg.t_end));
    s.emplace_back("step", fmt17(cfg.step));
    s.emplace_back("seed_samples", std::to_string(run.profile.seed_samples));
    s.emplace_back("seed_contraction_bound", fmt17(run.seed.contraction_bound));
    s.emplace_back("seed_picard_iterations", std::to_string(run.seed.picard_iterations));
    s.emplace_back("seed_residual", fmt17(run.seed.fixed_point_residual));
    s.emplace_back("switch_index", std::to_string(run.profile.switch_index));
    s.emplace_back("decay_rate_fit", fmt17(run.fit.rate));
    s.emplace_back("decay_rate_theory", fmt17(theory));
    s.emplace_back("decay_rel_err", fmt17(std::abs(run.fit.rate - theory) / theory));
    s.emplace_back("decay_ratio_mid", fmt17(run.fit.ratio_mid));
    s.emplace_back("decay_r2", fmt17(run.fit.r_squared));
    s.emplace_back("fit_window", fmt17(run.window.first) + " " + fmt17(run.window.second));
    s.emplace_back("flux_total", fmt17(run.flux.total));
    s.emplace_back("flux_area_form", fmt17(run.flux.area_form));
    s.emplace_back("flux_correction", fmt17(run.flux.correction));
    s.emplace_back("conservation_max_march", fmt17(run.conservation_march));
    s.emplace_back("conservation_max_all", fmt17(run.conservation_all));
    s.emplace_back("ode_residual", fmt17(run.ode_residual));
    s.emplace_back("farfield_pass", run.far.all_pass ? "1" : "0");
    write_summary(prefix + "_summary.txt", s);
}

// ---------------------------------------------------------------- verify --

struct CheckList {
    std::ostream& log;
    bool all = true;

    void check(const std::string& name, bool ok, const std::string& detail)
    {
        log << (ok ? "[PASS] " : "[FAIL] ") << name << " (" << detail << ")\n";
        all = all && ok;
    }
};

int verify_planar_artifacts(const std::string& prefix, std::ostream& log)
{
    const JobConfig art = load_config_file(prefix + "_config.cfg");
    const auto summary = read_summary(prefix + "_summary.txt");
    const CsvTable table = read_csv(prefix + "_field.csv");

    StringConfiguration strings = build_strings(art);
    PotentialModel model{strings.total_number(), art.m, art.planar_a(),
                         art.g0 ? *art.g0 : 1.0};
    Grid grid(art.grid_R, art.grid_n, strings);
    const double tol = art.tol;
    const double delta_final = std::stod(summary.at("delta_final"));
    const bool bracket_enforced = summary.at("bracket_enforced") == "1";

    if (table.rows.size() != grid.size())
        throw config_error("verify: field dump does not match the grid size");

    PlanarField field(grid, strings, model);
    field.delta = delta_final;
    NodeValues u_col(grid.size()), F12_col(grid.size()), eta_col(grid.size());
    for (int j = 0; j < grid.n(); ++j) {
        for (int i = 0; i < grid.n(); ++i) {
            const auto& row = table.rows[grid.index(i, j)];
            field.v[grid.index(i, j)] = row[2];
            u_col[grid.index(i, j)] = row[3];
            F12_col[grid.index(i, j)] = row[4];
            eta_col[grid.index(i, j)] = row[6];
        }
    }

    CheckList checks{log};

    const NodeValues u = physical_u(field);
    const NodeValues eta = log_conformal(model, strings, grid, u);
    double col_dev = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k)
        col_dev = std::max({col_dev, std::abs(u[k] - u_col[k]),
                            std::abs(eta[k] - eta_col[k])});
    checks.check("columns-consistent", col_dev <= 1e-9,
                 "max column deviation " + fmt17(col_dev));

    const double res = residual(model, strings, field);
    checks.check("residual", res <= tol * 1.0001, "residual " + fmt17(res));

    // self-dual and Einstein consistency away from centers
    const ConsistencyReport cons = check_consistency(model, strings, grid, u, eta);
    const double cons_tol =
        10.0 * (grid.spacing() * grid.spacing() + tol);
    checks.check("self-dual", cons.max_selfdual_dev <= cons_tol,
                 "max dev " + fmt17(cons.max_selfdual_dev) + " vs " + fmt17(cons_tol));
    checks.check("einstein", cons.max_einstein_dev <= cons_tol,
                 "max dev " + fmt17(cons.max_einstein_dev) + " vs " + fmt17(cons_tol));

    // the recomputed F12 must match the dumped column (tamper detection)
    const NodeValues F12 = magnetic_field(model, grid, u, eta);
    double f12_dev = 0.0;
    for (std::size_t k = 0; k < F12.size(); ++k)
        f12_dev = std::max(f12_dev, std::abs(F12[k] - F12_col[k]));
    checks.check("F12-column", f12_dev <= 1e-9, "max deviation " + fmt17(f12_dev));

    if (bracket_enforced) {
        const RegularizationParam reg(delta_final);
        double minv = 0.0, above_d = -1e300, above0 = -1e300;
        for (int j = 0; j < grid.n(); ++j)
            for (int i = 0; i < grid.n(); ++i) {
                const std::size_t k = grid.index(i, j);
                const Point2 p = grid.node(i, j);
                minv = std::min(minv, field.v[k]);
                above_d = std::max(above_d, field.v[k] + u0_delta_eval(strings, reg, p));
                above0 = std::max(above0, field.v[k] + u0_eval(strings, p));
            }
        checks.check("bracket",
                     minv >= 0.0 && above_d <= 1e-11 * (1.0 + grid.radius()) &&
                         above0 <= 1e-11 * (1.0 + grid.radius()),
                     "min v " + fmt17(minv) + ", max v+u0^d " + fmt17(above_d) +
                         ", max v+u0 " + fmt17(above0));
    }

    const FluxResult flux = total_flux(model, strings, grid, u, eta);
    const int N = strings.total_number();
    const double quantum = 2.0 * kPi * N;
    const bool flux_ok = (N > 0) ? std::abs(flux.total - quantum) <= 0.01 * quantum
                                 : std::abs(flux.total) <= 1e-8;
    checks.check("flux", flux_ok, "total " + fmt17(flux.total) + " vs " + fmt17(quantum));

    if (N > 0) {
        const FarFieldReport far = check_far_field_bounds(model, strings, grid, u);
        checks.check("far-field", far.all_pass, "max u " + fmt17(far.max_u));
    }
    return checks.all ? 0 : 1;
}

int verify_radial_artifacts(const std::string& prefix, std::ostream& log)
{
    const JobConfig art = load_config_file(prefix + "_config.cfg");
    const auto summary = read_summary(prefix + "_summary.txt");
    const CsvTable table = read_csv(prefix + "_profile.csv");

    const int N = art.total_N();
    PotentialModel model{N, art.m, art.a ? *art.a : 1.0 / N,
                         art.g0 ? *art.g0 : calibrate_g0(N, art.m)};
    const int seed_samples = std::stoi(summary.at("seed_samples"));

    RadialProfile profile;
    profile.model = model;
    profile.t0 = art.t0 ? *art.t0 : 0.0;
    profile.seed_samples = seed_samples;
    for (const auto& row : table.rows) {
        profile.t.push_back(row[0]);
        profile.U.push_back(row[2]);
        profile.Uprime.push_back(row[3]);
    }

    CheckList checks{log};

    bool negative = true, monotone = true;
    for (std::size_t i = 0; i < profile.U.size(); ++i) {
        negative = negative && profile.U[i] < 0.0;
        if (i > 0)
            monotone = monotone && profile.U[i] >= profile.U[i - 1];
    }
    checks.check("U-negative", negative, "all samples below 0");
    checks.check("U-monotone", monotone, "non-decreasing trajectory");

    double cons = 0.0;
    for (std::size_t i = 0; i < profile.U.size(); ++i) {
        if (static_cast<int>(i) < seed_samples)
            continue;
        cons = std::max(cons, std::abs(profile.Uprime[i] * profile.Uprime[i] -
                                       first_integral_eval(model, profile.U[i])));
    }
    const double cons_tol = 1e-8 * 4.0 * N * N;
    checks.check("conservation", cons <= cons_tol,
                 "max |U'^2 - F(U)| = " + fmt17(cons) + " vs " + fmt17(cons_tol));

    const double ode_res = verify_ode_residual(model, profile);
    const double step = art.step;
    const double ode_tol = 1e-5 * (step / 1e-3) * (step / 1e-3);
    checks.check("ode-residual", ode_res <= ode_tol,
                 fmt17(ode_res) + " vs " + fmt17(ode_tol));

    const auto window = decay_window(profile);
    const DecayFit fit = extract_decay(profile, window.first, window.second);
    const double theory = decay_exponent(N, art.m);
    checks.check("decay-rate", std::abs(fit.rate - theory) <= 0.02 * theory,
                 "fit " + fmt17(fit.rate) + " vs " + fmt17(theory));
    checks.check("decay-ratio", std::abs(fit.ratio_mid - theory) <= 0.02 * theory,
                 "ratio " + fmt17(fit.ratio_mid));

    const FluxResult flux = total_flux(model, profile);
    const double quantum = 2.0 * kPi * N;
    checks.check("flux", std::abs(flux.total - quantum) <= 0.01 * quantum,
                 "total " + fmt17(flux.total) + " vs " + fmt17(quantum));
    return checks.all ? 0 : 1;
}

} // namespace

int cmd_solve_planar(const JobConfig& cfg, std::ostream& log)
{
    const PlanarRun run = run_planar(cfg);
    write_planar_artifacts(cfg, run);
    log << "solve-planar: N = " << run.strings.total_number() << ", a = " << run.model.a
        << ", g0 = " << run.model.g0 << (run.g0_auto ? " (auto)" : "") << "\n"
        << "  stages " << run.result.stages.size() << ", total iterations";
    int iters = 0;
    for (const auto& st : run.result.stages)
        iters += st.iterations;
    log << " " << iters << ", residual " << run.result.field.residual_norm << "\n"
        << "  flux " << run.obs.flux.total << " (2*pi*N = "
        << 2.0 * kPi * run.strings.total_number() << ")\n"
        << "  artifacts: " << artifact_prefix(cfg) << "_{field.csv,summary.txt,config.cfg}\n";
    return 0;
}

int cmd_solve_radial(const JobConfig& cfg, std::ostream& log)
{
    const RadialRun run = run_radial(cfg);
    write_radial_artifacts(cfg, run);
    const double theory = decay_exponent(run.model.N, run.model.m);
    log << "solve-radial: N = " << run.model.N << ", m = " << run.model.m
        << ", calibrated g0 = " << run.model.g0 << "\n"
        << "  t0 = " << run.seed.t0 << " (contraction bound "
        << run.seed.contraction_bound << "), decay fit " << run.fit.rate << " vs "
        << theory << "\n"
        << "  flux " << run.flux.total << " (2*pi*N = " << 2.0 * kPi * run.model.N
        << "), conservation " << run.conservation_march << "\n"
        << "  artifacts: " << artifact_prefix(cfg)
        << "_{profile.csv,summary.txt,config.cfg}\n";
    return 0;
}

int cmd_verify(const JobConfig& cfg, std::ostream& log)
{
    std::string prefix;
    if (!cfg.verify_artifact.empty()) {
        prefix = cfg.verify_artifact;
    } else {
        // solve fresh, then verify the produced artifacts
        const StringConfiguration strings = build_strings(cfg);
        const int N = strings.total_number();
        const double a_eff = cfg.a ? *cfg.a : (N >= 1 ? 1.0 / N : 0.0);
        const bool radial =
            N >= 1 && strings.single_site() && std::abs(a_eff * N - 1.0) <= kCriticalTol;
        if (radial)
            cmd_solve_radial(cfg, log);
        else
            cmd_solve_planar(cfg, log);
        prefix = cfg.out_dir + "/" + cfg.basename;
    }
    const auto summary = read_summary(prefix + "_summary.txt");
    const auto kind = summary.find("kind");
    if (kind == summary.end())
        throw config_error("verify: summary lacks a kind entry: " + prefix);
    const int rc = (kind->second == "radial") ? verify_radial_artifacts(prefix, log)
                                              : verify_planar_artifacts(prefix, log);
    log << (rc == 0 ? "verify: all checks passed\n" : "verify: FAILURES above\n");
    return rc;
}

int cmd_sweep(const JobConfig& cfg, std::ostream& log)
{
    if (cfg.sweep_N.empty() || cfg.sweep_m.empty())
        throw config_error("sweep: needs sweep.N_values and sweep.m_values");
    CsvTable table;
    table.header = {"N",         "m",          "g0",          "rate_fit", "rate_theory",
                    "rel_err",   "ratio_mid",  "flux",        "conservation",
                    "ode_residual"};
    for (int N : cfg.sweep_N) {
        for (double m : cfg.sweep_m) {
            JobConfig sub = cfg;
            sub.N = N;
            sub.m = m;
            sub.a.reset();
            sub.g0.reset();
            sub.centers.clear();
            std::ostringstream base;
            base << cfg.basename << "_N" << N << "_m" << m;
            sub.basename = base.str();
            const RadialRun run = run_radial(sub);
            write_radial_artifacts(sub, run);
            const double theory = decay_exponent(N, m);
            table.rows.push_back({double(N), m, run.model.g0, run.fit.rate, theory,
                                  std::abs(run.fit.rate - theory) / theory,
                                  run.fit.ratio_mid, run.flux.total,
                                  run.conservation_march, run.ode_residual});
            log << "sweep: N = " << N << ", m = " << m << ", rate " << run.fit.rate
                << " vs " << theory << "\n";
        }
    }
    write_csv(artifact_prefix(cfg) + "_sweep.csv", table);
    return 0;
}

int run_command(const std::string& command, const std::string& config_path,
                std::ostream& log)
{
    if (command != "solve-planar" && command != "solve-radial" && command != "verify" &&
        command != "sweep") {
        log << "unknown command: " << command << "\n";
        return 3;
    }
    try {
        const JobConfig cfg = load_config_file(config_path);
        if (command == "solve-planar")
            return cmd_solve_planar(cfg, log);
        if (command == "solve-radial")
            return cmd_solve_radial(cfg, log);
        if (command == "verify")
            return cmd_verify(cfg, log);
        return cmd_sweep(cfg, log);
    } catch (const config_error& e) {
        log << "config error: " << e.what() << "\n";
        return 3;
    } catch (const regime_error& e) {
        log << "regime refusal: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        log << "numeric failure: " << e.what() << "\n";
        return 1;
    }
}

} // namespace sds
