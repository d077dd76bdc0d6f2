#include "sds/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace sds {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys)
{
    const std::size_t n = xs.size();
    if (n < 3)
        throw domain_error("fit_line: need at least 3 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ymean = sy / n;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ys[i] - (f.slope * xs[i] + f.intercept);
        ss_res += e * e;
        ss_tot += (ys[i] - ymean) * (ys[i] - ymean);
    }
    f.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

// sum_s n_s ln|x - p_s|^2 = u0 + w0
double log_center_product(const StringConfiguration& cfg, const Point2& x)
{
    return u0_eval(cfg, x) + w0_eval(cfg, x);
}

double lap5(const Grid& grid, const NodeValues& f, int i, int j)
{
    const double h2inv = 1.0 / (grid.spacing() * grid.spacing());
    return (f[grid.index(i - 1, j)] + f[grid.index(i + 1, j)] + f[grid.index(i, j - 1)] +
            f[grid.index(i, j + 1)] - 4.0 * f[grid.index(i, j)]) *
           h2inv;
}

double min_center_dist(const StringConfiguration& cfg, const Point2& x)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cfg.centers())
        best = std::min(best, std::sqrt(dist2(c.position, x)));
    return best;
}

} // namespace

NodeValues physical_u(const PlanarField& field)
{
    const Grid& grid = field.grid;
    NodeValues u(grid.size());
    for (int j = 0; j < grid.n(); ++j)
        for (int i = 0; i < grid.n(); ++i)
            u[grid.index(i, j)] = u0_eval(field.cfg, grid.node(i, j)) +
                                  field.v[grid.index(i, j)];
    return u;
}

NodeValues log_conformal(const PotentialModel& model, const StringConfiguration& cfg,
                         const Grid& grid, const NodeValues& u)
{
    NodeValues eta(grid.size());
    const double lead = std::log(model.g0 / 2.0);
    for (int j = 0; j < grid.n(); ++j) {
        for (int i = 0; i < grid.n(); ++i) {
            const std::size_t k = grid.index(i, j);
            const double uu = u[k];
            const double gint = std::exp(model.m * uu) / model.m;
            eta[k] = lead - model.a * (gint - uu + log_center_product(cfg, grid.node(i, j)));
        }
    }
    return eta;
}

double conformal_at(const PotentialModel& model, const StringConfiguration& cfg,
                    double u_value, const Point2& x)
{
    if (cfg.near_center(x))
        return 0.0; // the factor vanishes at a center for a > 0
    const double gint = std::exp(model.m * u_value) / model.m;
    return (model.g0 / 2.0) *
           std::exp(-model.a * (gint - u_value + log_center_product(cfg, x)));
}

NodeValues magnetic_field(const PotentialModel& model, const Grid& grid,
                          const NodeValues& u, const NodeValues& eta)
{
    NodeValues F12(grid.size());
    for (std::size_t k = 0; k < F12.size(); ++k)
        F12[k] = std::exp(eta[k]) * (-std::expm1(model.m * u[k]));
    return F12;
}

NodeValues energy_density(const PotentialModel& model, const Grid& grid,
                          const NodeValues& u, const NodeValues& eta)
{
    NodeValues W(grid.size()), H(grid.size(), 0.0);
    for (std::size_t k = 0; k < W.size(); ++k)
        W[k] = std::exp(model.m * u[k]) / model.m - u[k];
    for (int j = 1; j < grid.n() - 1; ++j)
        for (int i = 1; i < grid.n() - 1; ++i) {
            const std::size_t k = grid.index(i, j);
            H[k] = 0.5 * std::exp(-eta[k]) * lap5(grid, W, i, j);
        }
    return H;
}

NodeValues gauss_curvature(const Grid& grid, const NodeValues& eta)
{
    NodeValues K(grid.size(), 0.0);
    for (int j = 1; j < grid.n() - 1; ++j)
        for (int i = 1; i < grid.n() - 1; ++i) {
            const std::size_t k = grid.index(i, j);
            K[k] = -0.5 * std::exp(-eta[k]) * lap5(grid, eta, i, j);
        }
    return K;
}

FluxResult total_flux(const PotentialModel& model, const StringConfiguration& cfg,
                      const Grid& grid, const NodeValues& u, const NodeValues& eta)
{
    const int n = grid.n();
    const double h = grid.spacing();
    // contour at ~0.6 R: the outer belt of v is biased by the Dirichlet
    // truncation, while inside this ring the missing true tail is negligible
    const int mB = std::max(2, static_cast<int>(std::lround(0.2 * (n - 1))));
    const int lo = mB, hi = n - 1 - mB;

    // line integral of du/dn over the square contour, central differences
    auto dudx = [&](int i, int j) {
        return (u[grid.index(i + 1, j)] - u[grid.index(i - 1, j)]) / (2.0 * h);
    };
    auto dudy = [&](int i, int j) {
        return (u[grid.index(i, j + 1)] - u[grid.index(i, j - 1)]) / (2.0 * h);
    };
    double contour = 0.0;
    for (int s = lo; s < hi; ++s) {
        // trapezoid along each edge; outward normals +x, -x, +y, -y
        contour += 0.5 * h * (dudx(hi, s) + dudx(hi, s + 1));
        contour += 0.5 * h * (-dudx(lo, s) - dudx(lo, s + 1));
        contour += 0.5 * h * (dudy(s, hi) + dudy(s + 1, hi));
        contour += 0.5 * h * (-dudy(s, lo) - dudy(s + 1, lo));
    }

    FluxResult out;
    const double quantum = 2.0 * kPi * cfg.total_number();
    out.boundary_form = quantum - 0.5 * contour;
    out.total = out.boundary_form;

    // area quadrature of e^eta w(e^u) with trapezoid weights, over the same
    // trusted square as the contour (the true integrand outside it is
    // negligible, while the computed outer belt carries the truncation bias)
    double area = 0.0;
    for (int j = lo; j <= hi; ++j) {
        for (int i = lo; i <= hi; ++i) {
            double wgt = 1.0;
            if (i == lo || i == hi)
                wgt *= 0.5;
            if (j == lo || j == hi)
                wgt *= 0.5;
            const std::size_t k = grid.index(i, j);
            area += wgt * std::exp(eta[k]) * (-std::expm1(model.m * u[k]));
        }
    }
    out.area_form = area * h * h;

    out.correction = (cfg.total_number() > 0) ? std::abs(0.5 * contour) / quantum : 0.0;
    out.truncation_warning = out.correction > 0.05;
    return out;
}

FluxResult total_flux(const PotentialModel& model, const RadialProfile& profile)
{
    const std::size_t n = profile.t.size();
    if (n < 2)
        throw domain_error("total_flux: profile too short");
    // composite midpoint in t with the cell-center value of U
    double quad = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double dt = profile.t[i] - profile.t[i - 1];
        quad += dt * h_eval(model, 0.5 * (profile.U[i] + profile.U[i - 1]));
    }
    // exact tails: int_{-inf}^{t_first} h = U'(t_first) - 2N, int_{t_last}^{inf} h = -U'(t_last)
    const double tail_left = profile.Uprime.front() - 2.0 * model.N;
    const double tail_right = -profile.Uprime.back();

    FluxResult out;
    const double quantum = 2.0 * kPi * model.N;
    out.area_form = -kPi * (quad + tail_left + tail_right);
    out.boundary_form = quantum - kPi * profile.Uprime.back();
    out.total = out.boundary_form;
    out.correction = (model.N > 0) ? kPi * std::abs(profile.Uprime.back()) / quantum : 0.0;
    out.truncation_warning = out.correction > 0.05;
    return out;
}

ConsistencyReport check_consistency(const PotentialModel& model,
                                    const StringConfiguration& cfg, const Grid& grid,
                                    const NodeValues& u, const NodeValues& eta,
                                    double center_clearance)
{
    const NodeValues H = energy_density(model, grid, u, eta);
    const NodeValues Kg = gauss_curvature(grid, eta);
    ConsistencyReport rep;
    for (int j = 1; j < grid.n() - 1; ++j) {
        for (int i = 1; i < grid.n() - 1; ++i) {
            const Point2 p = grid.node(i, j);
            if (min_center_dist(cfg, p) < center_clearance)
                continue;
            const std::size_t k = grid.index(i, j);
            const double sd =
                std::abs(std::exp(eta[k]) * (-std::expm1(model.m * u[k])) +
                         0.5 * lap5(grid, u, i, j));
            const double ein = std::abs(Kg[k] - model.a * H[k]);
            rep.max_selfdual_dev = std::max(rep.max_selfdual_dev, sd);
            rep.max_einstein_dev = std::max(rep.max_einstein_dev, ein);
            ++rep.checked_nodes;
        }
    }
    return rep;
}

DeficitFit fit_deficit_exponent(const PotentialModel& model, const StringConfiguration& cfg,
                                const Grid& grid, const NodeValues& eta)
{
    (void)model;
    (void)cfg;
    // shell means wash out the O(d^2/r^2) angular modulation of the centers
    const double R = grid.radius();
    const double h = grid.spacing();
    std::map<int, std::pair<double, int>> shells;
    for (int j = 1; j < grid.n() - 1; ++j) {
        for (int i = 1; i < grid.n() - 1; ++i) {
            const Point2 p = grid.node(i, j);
            const double r = std::hypot(p.x, p.y);
            if (r < 0.4 * R || r > 0.7 * R)
                continue;
            auto& acc = shells[static_cast<int>(std::floor(r / h))];
            acc.first += eta[grid.index(i, j)];
            acc.second += 1;
        }
    }
    std::vector<double> xs, ys;
    for (const auto& [shell, acc] : shells) {
        xs.push_back(std::log((shell + 0.5) * h));
        ys.push_back(acc.first / acc.second);
    }
    const LineFit f = fit_line(xs, ys);
    return {-f.slope, f.r_squared};
}

DeficitFit fit_deficit_exponent(const PotentialModel& model, const RadialProfile& profile)
{
    std::vector<double> xs, ys;
    const double t_end = profile.t.back();
    const double t_from = t_end - 0.3 * (t_end - profile.t0);
    const double lead = std::log(model.g0 / 2.0);
    for (std::size_t i = 0; i < profile.t.size(); ++i) {
        if (profile.t[i] < t_from)
            continue;
        const double U = profile.U[i];
        const double eta =
            lead - model.a * (std::exp(model.m * U) / model.m - U +
                              2.0 * model.N * profile.t[i]);
        xs.push_back(profile.t[i]);
        ys.push_back(eta);
    }
    const LineFit f = fit_line(xs, ys);
    return {-f.slope, f.r_squared};
}

FarFieldReport check_far_field_bounds(const PotentialModel& model,
                                      const StringConfiguration& cfg, const Grid& grid,
                                      const NodeValues& u)
{
    FarFieldReport rep;
    rep.max_u = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < grid.n(); ++j)
        for (int i = 0; i < grid.n(); ++i)
            rep.max_u = std::max(rep.max_u, u[grid.index(i, j)]);
    rep.u_nonpositive = rep.max_u <= 1e-12;

    const double R = grid.radius();
    const double r_cal = std::max(2.0 * cfg.max_center_norm(), 0.25 * R);
    const bool critical = critical_coupling(model, 1e-9);
    // at the critical coupling with separated centers the b = 2 / b = 3
    // claims are sharp and asserted; below it the ladder holds for any
    // power and is reported over the trusted radii only
    const std::vector<double> field_bs =
        critical ? std::vector<double>{2.0} : std::vector<double>{2.0, 4.0, 6.0};

    // shell maxima of q r^b over [r_cal, 0.9 R]; beyond the valley of the
    // profile the Dirichlet truncation tail takes over and is excluded
    auto run_bound = [&](const std::vector<double>& values_r,
                         const std::vector<double>& values_q, double b,
                         bool asserted) -> BoundEntry {
        BoundEntry e;
        e.b = b;
        e.asserted = asserted;
        std::map<int, double> shellmax;
        const double width = 2.0 * grid.spacing();
        for (std::size_t k = 0; k < values_r.size(); ++k) {
            if (values_r[k] < r_cal || values_r[k] > 0.9 * R)
                continue;
            auto it = shellmax
                          .try_emplace(static_cast<int>(std::floor(values_r[k] / width)),
                                       0.0)
                          .first;
            it->second = std::max(it->second,
                                  values_q[k] * std::pow(values_r[k], b));
        }
        std::vector<double> M;
        for (const auto& [shell, value] : shellmax)
            M.push_back(value);
        if (M.size() < 4) {
            e.pass = false;
            return e;
        }
        std::size_t valley = 0;
        for (std::size_t s = 1; s < M.size(); ++s)
            if (M[s] < M[valley])
                valley = s;
        std::size_t peak = 0;
        for (std::size_t s = 1; s <= valley; ++s)
            if (M[s] > M[peak])
                peak = s;
        e.C_fit = M[peak];
        double worst = 1.0;
        for (std::size_t s = peak + 1; s <= valley; ++s)
            worst = std::max(worst, M[s] / e.C_fit);
        e.worst_ratio = worst;
        // a profile rising from the first shell onward is a genuine failure,
        // not a truncation artifact
        e.pass = worst <= 1.25 && (valley > 0 || M.back() <= 1.25 * M.front());
        return e;
    };

    std::vector<double> rs, neg_u, grad2;
    const double h = grid.spacing();
    for (int j = 1; j < grid.n() - 1; ++j) {
        for (int i = 1; i < grid.n() - 1; ++i) {
            const Point2 p = grid.node(i, j);
            const double r = std::hypot(p.x, p.y);
            if (r < r_cal)
                continue;
            rs.push_back(r);
            neg_u.push_back(-u[grid.index(i, j)]);
            const double ux =
                (u[grid.index(i + 1, j)] - u[grid.index(i - 1, j)]) / (2.0 * h);
            const double uy =
                (u[grid.index(i, j + 1)] - u[grid.index(i, j - 1)]) / (2.0 * h);
            grad2.push_back(ux * ux + uy * uy);
        }
    }
    for (double b : field_bs)
        rep.field_bounds.push_back(run_bound(rs, neg_u, b, critical));
    rep.gradient_bounds.push_back(run_bound(rs, grad2, 3.0, critical));

    rep.all_pass = rep.u_nonpositive;
    for (const auto& e : rep.field_bounds)
        if (e.asserted)
            rep.all_pass = rep.all_pass && e.pass;
    for (const auto& e : rep.gradient_bounds)
        if (e.asserted)
            rep.all_pass = rep.all_pass && e.pass;
    return rep;
}

FarFieldReport check_far_field_bounds(const PotentialModel& model,
                                      const RadialProfile& profile)
{
    FarFieldReport rep;
    rep.max_u = *std::max_element(profile.U.begin(), profile.U.end());
    rep.u_nonpositive = rep.max_u <= 1e-12;

    const auto window = decay_window(profile);
    const double rate = decay_exponent(model.N, model.m);
    double qmin = std::numeric_limits<double>::infinity(), qmax = 0.0;
    for (std::size_t i = 0; i < profile.t.size(); ++i) {
        const double t = profile.t[i];
        if (t < window.first || t > window.second)
            continue;
        const double q = std::abs(profile.U[i]) * std::exp(rate * t);
        qmin = std::min(qmin, q);
        qmax = std::max(qmax, q);
    }
    BoundEntry e;
    e.b = rate;
    e.asserted = true;
    e.C_fit = qmax;
    e.worst_ratio = qmax / qmin;
    e.pass = e.worst_ratio <= 1.10; // constant within 10% over the fit range
    rep.field_bounds.push_back(e);
    rep.all_pass = rep.u_nonpositive && e.pass;
    return rep;
}

ObservableSet compute_observables(const PotentialModel& model,
                                  const StringConfiguration& cfg,
                                  const PlanarField& field)
{
    ObservableSet obs;
    obs.u = physical_u(field);
    obs.eta = log_conformal(model, cfg, field.grid, obs.u);
    obs.F12 = magnetic_field(model, field.grid, obs.u, obs.eta);
    obs.energy = energy_density(model, field.grid, obs.u, obs.eta);
    obs.curvature = gauss_curvature(field.grid, obs.eta);
    obs.flux = total_flux(model, cfg, field.grid, obs.u, obs.eta);
    obs.deficit = fit_deficit_exponent(model, cfg, field.grid, obs.eta);
    for (std::size_t k = 0; k < obs.u.size(); ++k) {
        if (!std::isfinite(obs.u[k]) || !std::isfinite(obs.eta[k]) ||
            !std::isfinite(obs.F12[k]) || !std::isfinite(obs.energy[k]) ||
            !std::isfinite(obs.curvature[k]))
            throw numeric_error("compute_observables: non-finite field entry");
    }
    if (!std::isfinite(obs.flux.total))
        throw numeric_error("compute_observables: non-finite flux");
    return obs;
}

FlatDecayFit fit_flat_decay(const Grid& grid, const NodeValues& u, double r_lo,
                            double r_hi)
{
    // shell-averaged -u, fitted as ln(sqrt(r) |u|) vs r
    const double h = grid.spacing();
    std::map<int, std::pair<double, int>> shells; // shell -> (sum of -u, count)
    for (int j = 1; j < grid.n() - 1; ++j) {
        for (int i = 1; i < grid.n() - 1; ++i) {
            const Point2 p = grid.node(i, j);
            const double r = std::hypot(p.x, p.y);
            if (r < r_lo || r > r_hi)
                continue;
            auto& acc = shells[static_cast<int>(std::floor(r / h))];
            acc.first += -u[grid.index(i, j)];
            acc.second += 1;
        }
    }
    std::vector<double> xs, ys;
    for (const auto& [shell, acc] : shells) {
        const double r = (shell + 0.5) * h;
        const double mean = acc.first / acc.second;
        if (mean <= 0.0)
            continue;
        xs.push_back(r);
        ys.push_back(std::log(std::sqrt(r) * mean));
    }
    const LineFit f = fit_line(xs, ys);
    return {-f.slope, f.r_squared};
}

} // namespace sds
