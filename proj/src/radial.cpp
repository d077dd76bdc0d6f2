#include "sds/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace sds {

namespace {

void require_critical_calibrated(const PotentialModel& model, const char* who)
{
    validate_model(model);
    if (!critical_coupling(model))
        throw regime_error(std::string(who) + ": requires the critical coupling a*N = 1");
    const double cal = calibrate_g0(model.N, model.m);
    if (std::abs(model.g0 - cal) > 1e-9 * cal) {
        std::ostringstream msg;
        msg << who << ": g0 = " << model.g0 << " is not the calibrated value " << cal;
        throw regime_error(msg.str());
    }
}

// Radicand of the explicit first-order form,
//   1 - e^{(1/N)(1/m + U - e^{mU}/m)} = -expm1((U - expm1(mU)/m)/N),
// written to survive the cancellation near U = 0.
inline double radicand(const PotentialModel& model, double U)
{
    const double expo = (U - std::expm1(model.m * U) / model.m) / model.N;
    return -std::expm1(expo);
}

constexpr double kRadicandSwitch = 1e-14;
constexpr double kRadicandError = -1e-12;

} // namespace

double contraction_bound(const PotentialModel& model, double t0)
{
    require_critical_calibrated(model, "contraction_bound");
    const double a = model.a;
    const double twoaN = 2.0 * a * model.N; // = 2 at critical coupling
    const double Umax = 2.0 * model.N * t0 + 1.0;
    // C1 = sup |h'(U)| e^{-aU} over U <= Umax; the envelope tends to a*g0 as
    // U -> -inf and is sampled densely over the active range.
    double C1 = model.a * model.g0;
    const int samples = 4096;
    const double lo = Umax - 60.0;
    for (int i = 0; i <= samples; ++i) {
        const double U = lo + (Umax - lo) * i / samples;
        const double env = std::abs(h_prime_eval(model, U)) * std::exp(-a * U);
        C1 = std::max(C1, env);
    }
    return C1 * std::exp(a) * std::exp(twoaN * t0) / (twoaN * twoaN);
}

double admissible_t0(const PotentialModel& model, double target)
{
    require_critical_calibrated(model, "admissible_t0");
    if (!(target > 0.0) || !(target < 1.0))
        throw domain_error("admissible_t0: target must lie in (0, 1)");
    double lo = -60.0, hi = 20.0;
    if (contraction_bound(model, lo) > target)
        throw numeric_error("admissible_t0: no admissible t0 found above -60");
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (contraction_bound(model, mid) <= target)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

SeedState fixed_point_seed(const PotentialModel& model, double t0, double tol, double dt)
{
    require_critical_calibrated(model, "fixed_point_seed");
    if (!(tol > 0.0))
        throw domain_error("fixed_point_seed: tol must be positive");
    if (!(dt > 0.0))
        throw domain_error("fixed_point_seed: dt must be positive");

    const double kappa = contraction_bound(model, t0);
    if (kappa >= 1.0) {
        std::ostringstream msg;
        msg << "fixed_point_seed: contraction estimate " << kappa << " >= 1 at t0 = " << t0
            << "; largest admissible t0 is " << admissible_t0(model, 0.999);
        throw domain_error(msg.str());
    }

    const double twoaN = 2.0 * model.a * model.N;
    SeedState seed;
    seed.N = model.N;
    seed.t0 = t0;
    seed.t_lo = t0 - 40.0 / twoaN; // integrand below 1e-16 of local scale there
    seed.dt = dt;
    seed.contraction_bound = kappa;

    const int count = static_cast<int>(std::llround((t0 - seed.t_lo) / dt));
    seed.t.resize(count + 1);
    for (int i = 0; i <= count; ++i)
        seed.t[i] = seed.t_lo + i * dt;
    seed.t.back() = t0;

    const std::size_t npts = seed.t.size();
    std::vector<double> w(npts, 0.0), phi(npts), I1(npts), I2(npts), Tw(npts);

    auto apply_T = [&](const std::vector<double>& win, std::vector<double>& out) {
        for (std::size_t i = 0; i < npts; ++i)
            phi[i] = h_eval(model, 2.0 * model.N * seed.t[i] + win[i]);
        I1[0] = 0.0;
        I2[0] = 0.0;
        for (std::size_t i = 1; i < npts; ++i) {
            const double step = seed.t[i] - seed.t[i - 1];
            I1[i] = I1[i - 1] + 0.5 * step * (phi[i] + phi[i - 1]);
            I2[i] = I2[i - 1] +
                    0.5 * step * (seed.t[i] * phi[i] + seed.t[i - 1] * phi[i - 1]);
        }
        for (std::size_t i = 0; i < npts; ++i)
            out[i] = seed.t[i] * I1[i] - I2[i];
    };

    const int max_picard = 200;
    double diff = 0.0;
    for (int it = 0; it < max_picard; ++it) {
        apply_T(w, Tw);
        diff = 0.0;
        for (std::size_t i = 0; i < npts; ++i)
            diff = std::max(diff, std::abs(Tw[i] - w[i]));
        w = Tw;
        seed.picard_diffs.push_back(diff);
        seed.picard_iterations = it + 1;
        if (diff <= 0.5 * tol)
            break;
    }
    apply_T(w, Tw);
    double resid = 0.0, supw = 0.0;
    for (std::size_t i = 0; i < npts; ++i) {
        resid = std::max(resid, std::abs(Tw[i] - w[i]));
        supw = std::max(supw, std::abs(w[i]));
    }
    if (resid > tol)
        throw convergence_error("fixed_point_seed: Picard iteration stalled at residual " +
                                std::to_string(resid));
    if (supw > 1.0)
        throw numeric_error("fixed_point_seed: fixed point left the unit ball "
                            "(sup |w| = " + std::to_string(supw) + ")");
    seed.fixed_point_residual = resid;
    seed.w = std::move(w);
    // derivative of the fixed point: w'(t) = int h
    for (std::size_t i = 0; i < npts; ++i)
        phi[i] = h_eval(model, 2.0 * model.N * seed.t[i] + seed.w[i]);
    seed.w_prime.resize(npts);
    seed.w_prime[0] = 0.0;
    for (std::size_t i = 1; i < npts; ++i) {
        const double step = seed.t[i] - seed.t[i - 1];
        seed.w_prime[i] = seed.w_prime[i - 1] + 0.5 * step * (phi[i] + phi[i - 1]);
    }
    return seed;
}

namespace {

void march_core(const PotentialModel& model, double t0, double U0, double t_end,
                double step, RadialProfile& prof)
{
    if (!(step > 0.0))
        throw domain_error("first_integral_march: step must be positive");
    if (!(t_end > t0))
        throw domain_error("first_integral_march: t_end must exceed t0");

    // hit flags a sub-evaluation inside the clamped zone around U = 0; the
    // step that raised it is discarded and the march hands over to the
    // linearized decay, so no accepted step ever mixes clamped slopes.
    auto fU = [&](double U, bool& hit) {
        double rad = radicand(model, U);
        if (rad < kRadicandError) {
            std::ostringstream msg;
            msg << "first_integral_march: radicand " << rad << " at U = " << U
                << "; g0 inconsistent with the critical calibration";
            throw numeric_error(msg.str());
        }
        if (rad < kRadicandSwitch) {
            hit = true;
            rad = std::max(rad, 0.0);
        }
        return 2.0 * model.N * std::sqrt(rad);
    };

    const double rate = decay_exponent(model.N, model.m);
    const int steps = static_cast<int>(std::llround((t_end - t0) / step));
    double U = U0;
    for (int k = 0; k <= steps; ++k) {
        const double tk = t0 + k * step;
        prof.t.push_back(tk);
        prof.U.push_back(U);
        bool at_node = false;
        if (prof.switch_index < 0) {
            const double slope = fU(U, at_node);
            if (at_node) {
                prof.switch_index = static_cast<int>(prof.t.size()) - 1;
                prof.Uprime.push_back(-rate * U);
            } else {
                prof.Uprime.push_back(slope);
            }
        } else {
            prof.Uprime.push_back(-rate * U);
        }
        if (k == steps)
            break;
        if (prof.switch_index < 0) {
            bool hit = false;
            const double k1 = fU(U, hit);
            const double k2 = fU(U + 0.5 * step * k1, hit);
            const double k3 = fU(U + 0.5 * step * k2, hit);
            const double k4 = fU(U + step * k3, hit);
            if (hit) {
                prof.switch_index = static_cast<int>(prof.t.size()) - 1;
                prof.Uprime.back() = -rate * U;
            } else {
                U += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        }
        if (prof.switch_index >= 0)
            U = prof.U[prof.switch_index] *
                std::exp(-rate * (tk + step - prof.t[prof.switch_index]));
    }
}

} // namespace

RadialProfile first_integral_march(const PotentialModel& model, const SeedState& seed,
                                   double t_end, double step)
{
    require_critical_calibrated(model, "first_integral_march");
    if (seed.w.empty() || seed.N != model.N)
        throw domain_error("first_integral_march: seed does not match model");

    RadialProfile prof;
    prof.model = model;
    prof.t0 = seed.t0;

    // prepend the seed samples, decimated to the march step
    const int stride = std::max(1, static_cast<int>(std::llround(step / seed.dt)));
    for (std::size_t i = 0; i + 1 < seed.t.size(); i += stride) {
        prof.t.push_back(seed.t[i]);
        prof.U.push_back(2.0 * model.N * seed.t[i] + seed.w[i]);
        prof.Uprime.push_back(2.0 * model.N + seed.w_prime[i]);
    }
    prof.seed_samples = static_cast<int>(prof.t.size());

    march_core(model, seed.t0, seed.U_at_t0(), t_end, step, prof);

    for (std::size_t i = 1; i < prof.U.size(); ++i) {
        if (prof.U[i] < prof.U[i - 1])
            throw numeric_error("first_integral_march: profile not monotone");
        if (prof.U[i] >= 0.0)
            throw numeric_error("first_integral_march: profile reached U >= 0");
    }
    return prof;
}

RadialProfile march_from(const PotentialModel& model, double t0, double U0, double t_end,
                         double step)
{
    require_critical_calibrated(model, "first_integral_march");
    if (!(U0 <= 0.0))
        throw domain_error("march_from: U0 must be <= 0");
    RadialProfile prof;
    prof.model = model;
    prof.t0 = t0;
    march_core(model, t0, U0, t_end, step, prof);
    return prof;
}

double verify_ode_residual(const PotentialModel& model, const RadialProfile& profile)
{
    const std::size_t n = profile.t.size();
    if (n < 3)
        throw domain_error("verify_ode_residual: need at least 3 samples");
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double dtl = profile.t[i] - profile.t[i - 1];
        const double dtr = profile.t[i + 1] - profile.t[i];
        if (std::abs(dtl - dtr) > 1e-9 * std::max(dtl, dtr))
            continue; // seam between differently spaced segments
        const double second =
            (profile.U[i + 1] - 2.0 * profile.U[i] + profile.U[i - 1]) / (dtl * dtr);
        worst = std::max(worst, std::abs(second - h_eval(model, profile.U[i])));
    }
    return worst;
}

std::pair<double, double> decay_window(const RadialProfile& profile, double absU_lo,
                                       double absU_hi)
{
    double t_lo = 0.0, t_hi = 0.0;
    bool found_lo = false, found_hi = false;
    for (std::size_t i = 0; i < profile.t.size(); ++i) {
        const double mag = std::abs(profile.U[i]);
        if (!found_lo && mag <= absU_hi) {
            t_lo = profile.t[i];
            found_lo = true;
        }
        if (!found_hi && mag <= absU_lo) {
            t_hi = profile.t[i];
            found_hi = true;
            break;
        }
    }
    if (!found_lo || !found_hi)
        throw domain_error("decay_window: profile does not cover |U| down to " +
                           std::to_string(absU_lo) + "; extend t_end");
    return {t_lo, t_hi};
}

DecayFit extract_decay(const RadialProfile& profile, double t_lo, double t_hi)
{
    if (!(t_hi > t_lo))
        throw domain_error("extract_decay: empty window");
    std::vector<double> ts, ys;
    bool regime_ok = true;
    for (std::size_t i = 0; i < profile.t.size(); ++i) {
        const double t = profile.t[i];
        if (t < t_lo || t > t_hi)
            continue;
        const double U = profile.U[i];
        if (!(U < 0.0) || std::abs(U) >= 0.1)
            regime_ok = false;
        if (U == 0.0)
            continue;
        ts.push_back(t);
        ys.push_back(std::log(std::abs(U)));
    }
    if (ts.size() < 3)
        throw domain_error("extract_decay: window outside the profile range");

    const std::size_t n = ts.size();
    double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        st += ts[i];
        sy += ys[i];
        stt += ts[i] * ts[i];
        sty += ts[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double denom = n * stt - st * st;
    const double slope = (n * sty - st * sy) / denom;
    const double ss_tot = syy - sy * sy / n;
    const double ss_res = [&] {
        const double intercept = (sy - slope * st) / n;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = ys[i] - (slope * ts[i] + intercept);
            acc += e * e;
        }
        return acc;
    }();

    DecayFit fit;
    fit.rate = -slope;
    fit.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    fit.regime_ok = regime_ok;

    // pointwise rate at the window midpoint (sign folded: positive value)
    const double t_mid = 0.5 * (t_lo + t_hi);
    std::size_t best = 0;
    double bestdist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < profile.t.size(); ++i) {
        const double d = std::abs(profile.t[i] - t_mid);
        if (d < bestdist) {
            bestdist = d;
            best = i;
        }
    }
    fit.ratio_mid = -profile.Uprime[best] / profile.U[best];
    return fit;
}

RadialField to_radial_field(const RadialProfile& profile)
{
    RadialField field;
    const std::size_t n = profile.t.size();
    field.r.resize(n);
    field.u.resize(n);
    field.u_r.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        field.r[i] = std::exp(profile.t[i]);
        field.u[i] = profile.U[i];
        field.u_r[i] = profile.Uprime[i] / field.r[i];
    }
    return field;
}

} // namespace sds
