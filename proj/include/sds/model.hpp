#ifndef SDS_MODEL_HPP
#define SDS_MODEL_HPP

#include "sds/errors.hpp"

namespace sds {

// Parameters of the string model with potential w(s) = 1 - s^m.
//
//   N  - total string number (winding), N >= 1; N = 0 only for the trivial path
//   m  - potential exponent, m > 0
//   a  - gravitational coupling block (a = 8*pi*G), 0 <= a*N <= 1
//   g0 - overall coupling constant, g0 > 0
struct PotentialModel {
    int N = 1;
    double m = 1.0;
    double a = 0.0;
    double g0 = 1.0;
};

// Throws domain_error / regime_error if the parameter set is invalid.
// a*N > 1 is rejected: outside the existence regime.
void validate_model(const PotentialModel& model);

// w(s) = 1 - s^m, the symmetry-breaking potential factor; s >= 0.
double w_eval(const PotentialModel& model, double s);

// f(s) = s^(m-1), the kinetic coupling solving -f(s)*s = w(s) - 1; s > 0.
double f_eval(const PotentialModel& model, double s);

// g_int(s) = integral_0^s f = s^m / m. Named g_int: the planar source term
// g = lap(w0) is a different object (see background.hpp).
double g_int_eval(const PotentialModel& model, double s);

// Nonlinearity of the reduced radial equation U'' = h(U):
//   h(U) = g0 * exp(a*U - (a/m) e^{mU}) * (e^{mU} - 1).
// Overflow-guarded: for a > 0 and mU large the double exponential drives
// the value to zero; evaluated through logs in that range.
double h_eval(const PotentialModel& model, double U);

// h'(U) = g0 * exp(a*U - (a/m) e^{mU}) * (m e^{mU} - a (e^{mU} - 1)^2).
double h_prime_eval(const PotentialModel& model, double U);

// First integral of the radial equation (requires a > 0):
//   F(U) = (U')^2 = 4 N^2 - (2 g0 / a) exp(a (U - e^{mU}/m)).
// Throws regime_error at a = 0 (the flat path uses flat_decay_rate instead).
double first_integral_eval(const PotentialModel& model, double U);

// Critical-coupling calibration (a*N = 1): g0 = 2 N e^{1/(m N)}, the unique
// value for which the first integral vanishes at the equilibrium U = 0.
double calibrate_g0(int N, double m);

// Sharp decay rate sqrt(2 N m) = sqrt(F''(0)/2) of |U| as t -> +infinity
// in the calibrated critical case.
double decay_exponent(int N, double m);

// Linearized decay rate sqrt(g0 * m) for the flat (a = 0) vortex.
double flat_decay_rate(const PotentialModel& model);

// True when a*N is at the critical coupling within tolerance.
bool critical_coupling(const PotentialModel& model, double tol = 1e-12);

} // namespace sds

#endif
