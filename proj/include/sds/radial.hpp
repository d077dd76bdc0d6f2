#ifndef SDS_RADIAL_HPP
#define SDS_RADIAL_HPP

#include "sds/model.hpp"

#include <utility>
#include <vector>

namespace sds {

// Fixed-point seed near t = -infinity: w(t) = U(t) - 2N t sampled on
// [t_lo, t0], obtained by Picard iteration on
//   w(t) = int_{-inf}^t (t - tau) h(2N tau + w(tau)) dtau.
struct SeedState {
    double t0 = 0.0;
    double t_lo = 0.0;  // integral tail truncated below this point
    double dt = 0.0;
    std::vector<double> t;
    std::vector<double> w;
    std::vector<double> w_prime;  // running integral of h, so U' = 2N + w_prime

    double contraction_bound = 0.0;   // certified bound for the map T (< 1)
    double fixed_point_residual = 0.0; // sup |w - T(w)| at exit
    int picard_iterations = 0;
    std::vector<double> picard_diffs; // sup-norm of successive Picard differences

    int N = 0;
    double U_at_t0() const { return 2.0 * N * t0 + w.back(); }
    double Uprime_at_t0() const { return 2.0 * N + w_prime.back(); }
};

// Contraction bound for T at matching point t0:
//   C1 e^a e^{2 a N t0} / (2 a N)^2 with C1 = sup_{U <= 2N t0 + 1} |h'(U)| e^{-aU}.
double contraction_bound(const PotentialModel& model, double t0);

// Largest t0 whose contraction bound stays <= target (default 1/2), found
// by bisection.
double admissible_t0(const PotentialModel& model, double target = 0.5);

SeedState fixed_point_seed(const PotentialModel& model, double t0, double tol,
                           double dt = 2.5e-4);

// Log-radius trajectory. The first seed_samples entries come from the seed
// region t < t0; the rest from the first-integral march. switch_index marks
// where the march handed over to the linearized equilibrium decay (-1 if
// it never did).
struct RadialProfile {
    PotentialModel model;
    double t0 = 0.0;
    std::vector<double> t;
    std::vector<double> U;
    std::vector<double> Uprime;
    int seed_samples = 0;
    int switch_index = -1;
};

// Marches U' = 2N sqrt(1 - e^{(1/N)(1/m + U - e^{mU}/m)}) with classical RK4
// from (t0, U(t0)) given by the seed up to t_end, prepending the seed samples.
// Once the radicand drops below 1e-14 (approach to the equilibrium U = 0)
// the march switches to the linearized decay U ~ e^{-sqrt(2Nm) t}.
RadialProfile first_integral_march(const PotentialModel& model, const SeedState& seed,
                                   double t_end, double step);

// Same march from an explicit starting value, without a seed prefix.
RadialProfile march_from(const PotentialModel& model, double t0, double U0, double t_end,
                         double step);

// Max over interior samples of |second-difference(U)/dt^2 - h(U)|: checks
// that the first-integral march solves the second-order equation.
double verify_ode_residual(const PotentialModel& model, const RadialProfile& profile);

struct DecayFit {
    double rate = 0.0;       // negated least-squares slope of ln|U| vs t
    double r_squared = 0.0;
    double ratio_mid = 0.0;  // -U'/U at the window midpoint (positive rate)
    bool regime_ok = true;   // U < 0 and |U| < 0.1 throughout the window
};

DecayFit extract_decay(const RadialProfile& profile, double t_lo, double t_hi);

// Window where absU_lo <= |U| <= absU_hi, for decay fitting.
std::pair<double, double> decay_window(const RadialProfile& profile,
                                       double absU_lo = 1e-6, double absU_hi = 1e-2);

struct RadialField {
    std::vector<double> r;
    std::vector<double> u;
    std::vector<double> u_r;
};

// Returns to the original variable r = e^t: u(r) = U(ln r), u_r = U'(ln r)/r.
RadialField to_radial_field(const RadialProfile& profile);

} // namespace sds

#endif
