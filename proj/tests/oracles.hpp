// Test-side oracles, independent of the library's solution paths:
// quadrature, finite differences, a flat-vortex shooting integrator, and a
// direct second-order march of the radial equation.
#ifndef SDS_TEST_ORACLES_HPP
#define SDS_TEST_ORACLES_HPP

#include "sds/model.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

// Composite Simpson refined until two successive levels agree.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double rel_tol = 1e-12)
{
    double prev = 0.0;
    for (int level = 4; level <= 24; ++level) {
        const std::size_t n = std::size_t(1) << level; // even
        const double h = (b - a) / n;
        double acc = f(a) + f(b);
        for (std::size_t i = 1; i < n; ++i)
            acc += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
        const double val = acc * h / 3.0;
        if (level > 4 && std::abs(val - prev) <= rel_tol * (std::abs(val) + 1e-300))
            return val;
        prev = val;
    }
    return prev;
}

inline double central_diff(const std::function<double(double)>& f, double x,
                           double eps = 1e-5)
{
    return (f(x + eps) - f(x - eps)) / (2.0 * eps);
}

// Five-point Laplacian of a callable at a point.
inline double laplacian5(const std::function<double(double, double)>& f, double x,
                         double y, double h = 1e-3)
{
    return (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)) /
           (h * h);
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys)
{
    const std::size_t n = xs.size();
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
    const double ym = sy / n;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ys[i] - (f.slope * xs[i] + f.intercept);
        ss_res += e * e;
        ss_tot += (ys[i] - ym) * (ys[i] - ym);
    }
    f.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

// Flat (a = 0) vortex profile by shooting in t = ln r on
//   U'' = g0 e^{2t} (e^{mU} - 1),   U ~ 2N t + beta as t -> -inf.
// Bisection on beta; beyond r_linear the profile continues with the
// modified-Bessel far field c K0(sqrt(g0 m) r).
class FlatVortexOracle {
public:
    FlatVortexOracle(int N, double m, double g0, double r_max, double t_lo = -9.0,
                     double dt = 5e-4)
        : N_(N), m_(m), g0_(g0), kappa_(std::sqrt(g0 * m))
    {
        const double t_hi = std::log(r_max) + 0.05;
        const int steps = int((t_hi - t_lo) / dt) + 1;

        auto run = [&](double beta, std::vector<double>* out) {
            double U = 2.0 * N_ * t_lo + beta;
            double V = 2.0 * N_; // U'
            if (out) {
                out->clear();
                out->push_back(U);
            }
            auto acc = [&](double t, double u) {
                return g0_ * std::exp(2.0 * t) * std::expm1(m_ * u);
            };
            for (int k = 0; k < steps; ++k) {
                const double t = t_lo + k * dt;
                const double k1u = V, k1v = acc(t, U);
                const double k2u = V + 0.5 * dt * k1v,
                             k2v = acc(t + 0.5 * dt, U + 0.5 * dt * k1u);
                const double k3u = V + 0.5 * dt * k2v,
                             k3v = acc(t + 0.5 * dt, U + 0.5 * dt * k2u);
                const double k4u = V + dt * k3v, k4v = acc(t + dt, U + dt * k3u);
                U += dt / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
                V += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
                if (out)
                    out->push_back(U);
                if (U > 0.5)
                    return +1; // overshoot
                if (V < 0.0)
                    return -1; // falls back to -inf
            }
            return 0;
        };

        double lo = -6.0, hi = 2.0;
        if (run(lo, nullptr) != -1 || run(hi, nullptr) != +1)
            throw std::runtime_error("flat vortex oracle: bisection bracket invalid");
        for (int it = 0; it < 120; ++it) {
            const double mid = 0.5 * (lo + hi);
            (run(mid, nullptr) == +1 ? hi : lo) = mid;
        }
        beta_ = 0.5 * (lo + hi);
        run(beta_, &samples_);
        t_lo_ = t_lo;
        dt_ = dt;

        // attach the K0 tail where the trajectory is deep in the linear regime
        r_linear_ = 0.45 * r_max;
        const double t_match = std::log(r_linear_);
        c_tail_ = u_shoot(t_match) / k0(kappa_ * r_linear_);
    }

    double beta() const { return beta_; }

    double u(double r) const
    {
        if (r >= r_linear_)
            return c_tail_ * k0(kappa_ * r);
        return u_shoot(std::log(r));
    }

private:
    static double k0(double x) { return std::cyl_bessel_k(0.0, x); }

    double u_shoot(double t) const
    {
        const double pos = (t - t_lo_) / dt_;
        const auto i = static_cast<std::size_t>(pos);
        if (pos < 0.0)
            return 2.0 * N_ * t + beta_;
        if (i + 1 >= samples_.size())
            throw std::runtime_error("flat vortex oracle: t out of range");
        const double w = pos - double(i);
        return (1.0 - w) * samples_[i] + w * samples_[i + 1];
    }

    int N_;
    double m_, g0_, kappa_;
    double beta_ = 0.0;
    double t_lo_ = 0.0, dt_ = 0.0;
    double r_linear_ = 0.0, c_tail_ = 0.0;
    std::vector<double> samples_;
};

// Direct RK4 march of the second-order radial system U'' = h(U) from an
// explicit phase point.
struct SecondOrderMarch {
    std::vector<double> t, U, Uprime;
};

inline SecondOrderMarch second_order_march(const sds::PotentialModel& model, double t0,
                                           double U0, double V0, double t_end,
                                           double step)
{
    SecondOrderMarch out;
    const int steps = int(std::llround((t_end - t0) / step));
    double U = U0, V = V0;
    for (int k = 0; k <= steps; ++k) {
        out.t.push_back(t0 + k * step);
        out.U.push_back(U);
        out.Uprime.push_back(V);
        if (k == steps)
            break;
        const double k1u = V, k1v = sds::h_eval(model, U);
        const double k2u = V + 0.5 * step * k1v,
                     k2v = sds::h_eval(model, U + 0.5 * step * k1u);
        const double k3u = V + 0.5 * step * k2v,
                     k3v = sds::h_eval(model, U + 0.5 * step * k2u);
        const double k4u = V + step * k3v, k4v = sds::h_eval(model, U + step * k3u);
        U += step / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
        V += step / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    }
    return out;
}

} // namespace oracles

#endif
