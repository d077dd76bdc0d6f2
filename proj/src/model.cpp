#include "sds/model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sds {

void validate_model(const PotentialModel& model)
{
    if (model.N < 0)
        throw domain_error("model: N must be >= 0 (0 only on the trivial path)");
    if (!(model.m > 0.0) || !std::isfinite(model.m))
        throw domain_error("model: m must be positive");
    if (model.a < 0.0 || !std::isfinite(model.a))
        throw domain_error("model: a must be >= 0");
    if (model.a * model.N > 1.0 + 1e-12)
        throw regime_error("model: a*N = " + std::to_string(model.a * model.N) +
                           " exceeds 1; outside the existence regime");
    if (!(model.g0 > 0.0) || !std::isfinite(model.g0))
        throw domain_error("model: g0 must be positive");
}

double w_eval(const PotentialModel& model, double s)
{
    if (!(s >= 0.0))
        throw domain_error("w_eval: s must be >= 0");
    return 1.0 - std::pow(s, model.m);
}

double f_eval(const PotentialModel& model, double s)
{
    if (!(s > 0.0))
        throw domain_error("f_eval: s must be > 0 (f is singular at 0 for m < 1)");
    return std::pow(s, model.m - 1.0);
}

double g_int_eval(const PotentialModel& model, double s)
{
    if (!(s >= 0.0))
        throw domain_error("g_int_eval: s must be >= 0");
    return std::pow(s, model.m) / model.m;
}

namespace {

// e^{mU} starts overflowing doubles above this.
constexpr double kExpArgCap = 700.0;

} // namespace

double h_eval(const PotentialModel& model, double U)
{
    if (!std::isfinite(U))
        throw domain_error("h_eval: U must be finite");
    const double m = model.m, a = model.a, g0 = model.g0;
    const double mU = m * U;
    if (mU > kExpArgCap) {
        if (a <= 0.0)
            return g0 * std::expm1(mU); // flat case: no suppression, saturates to +inf
        // log|h| ~ ln g0 + (a+m)U - (a/m) e^{mU}; the last term wins.
        const double lt = std::log(a / m) + mU;
        if (lt > kExpArgCap)
            return 0.0;
        return std::exp(std::log(g0) + (a + m) * U - std::exp(lt));
    }
    const double emU = std::exp(mU);
    return g0 * std::exp(a * U - (a / m) * emU) * std::expm1(mU);
}

double h_prime_eval(const PotentialModel& model, double U)
{
    if (!std::isfinite(U))
        throw domain_error("h_prime_eval: U must be finite");
    const double m = model.m, a = model.a, g0 = model.g0;
    const double mU = m * U;
    if (mU > kExpArgCap) {
        if (a <= 0.0)
            return g0 * m * std::exp(mU);
        const double lt = std::log(a / m) + mU;
        if (lt > kExpArgCap)
            return 0.0;
        // dominant magnitude a e^{2mU}, sign negative
        return -std::exp(std::log(g0) + a * U - std::exp(lt) + std::log(a) + 2.0 * mU);
    }
    const double emU = std::exp(mU);
    const double q = std::expm1(mU);
    return g0 * std::exp(a * U - (a / m) * emU) * (m * emU - a * q * q);
}

double first_integral_eval(const PotentialModel& model, double U)
{
    if (!std::isfinite(U))
        throw domain_error("first_integral_eval: U must be finite");
    if (!(model.a > 0.0))
        throw regime_error("first_integral_eval: undefined at a = 0; "
                           "use flat_decay_rate for the flat vortex path");
    const double m = model.m, a = model.a;
    const double fourN2 = 4.0 * double(model.N) * double(model.N);
    const double mU = m * U;
    double expo; // a * (U - e^{mU}/m)
    if (mU > kExpArgCap) {
        const double lt = std::log(a / m) + mU;
        expo = (lt > kExpArgCap) ? -std::numeric_limits<double>::infinity()
                                 : a * U - std::exp(lt);
    } else {
        expo = a * (U - std::exp(mU) / m);
    }
    return fourN2 - (2.0 * model.g0 / a) * std::exp(expo);
}

double calibrate_g0(int N, double m)
{
    if (N < 1)
        throw domain_error("calibrate_g0: N must be >= 1");
    if (!(m > 0.0))
        throw domain_error("calibrate_g0: m must be positive");
    return 2.0 * N * std::exp(1.0 / (m * N));
}

double decay_exponent(int N, double m)
{
    if (N < 1)
        throw domain_error("decay_exponent: N must be >= 1");
    if (!(m > 0.0))
        throw domain_error("decay_exponent: m must be positive");
    return std::sqrt(2.0 * N * m);
}

double flat_decay_rate(const PotentialModel& model)
{
    if (model.a != 0.0)
        throw regime_error("flat_decay_rate: defined only for a = 0");
    return std::sqrt(model.g0 * model.m);
}

bool critical_coupling(const PotentialModel& model, double tol)
{
    return std::abs(model.a * model.N - 1.0) <= tol;
}

} // namespace sds
