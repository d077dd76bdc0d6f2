#ifndef SDS_BACKGROUND_HPP
#define SDS_BACKGROUND_HPP

#include "sds/errors.hpp"

#include <vector>

namespace sds {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline double dist2(const Point2& a, const Point2& b)
{
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

struct StringCenter {
    Point2 position;
    int multiplicity = 1;
};

// Evaluations closer than this to a center (with delta = 0) return the
// signed-infinity sentinel; grid construction keeps nodes outside this range.
constexpr double kCenterProximity = 1e-12;

// Set of string centers with multiplicities. Duplicate points are merged
// into one entry with summed multiplicity; N is the sum of multiplicities.
class StringConfiguration {
public:
    StringConfiguration() = default; // N = 0, trivial path

    explicit StringConfiguration(std::vector<StringCenter> centers);

    static StringConfiguration coincident(int N, Point2 p = {});

    const std::vector<StringCenter>& centers() const { return centers_; }
    int total_number() const { return total_; }

    double max_center_norm() const;
    bool near_center(const Point2& x, double tol = kCenterProximity) const;

    // All strings share one site (single merged center).
    bool single_site() const { return centers_.size() == 1; }

private:
    std::vector<StringCenter> centers_;
    int total_ = 0;
};

// delta in [0, 1); delta = 0 is the continued (unregularized) limit, valid
// for pointwise evaluation away from centers. The regularized solve itself
// requires delta > 0.
struct RegularizationParam {
    double delta = 0.5;

    RegularizationParam() = default;
    explicit RegularizationParam(double d) : delta(d)
    {
        if (!(d >= 0.0) || !(d < 1.0))
            throw domain_error("RegularizationParam: delta must lie in [0, 1)");
    }
};

// u0(x) = sum_s n_s ln(|x-p_s|^2 / (1+|x-p_s|^2)) <= 0.
// Returns -infinity at a center (sentinel; pair with near_center()).
double u0_eval(const StringConfiguration& cfg, const Point2& x);

// w0(x) = sum_s n_s ln(1 + |x-p_s|^2) >= 0.
double w0_eval(const StringConfiguration& cfg, const Point2& x);

// g(x) = lap(w0) = 4 sum_s n_s / (1+|x-p_s|^2)^2 > 0 for N >= 1.
double source_g_eval(const StringConfiguration& cfg, const Point2& x);

// u0^delta(x) = sum_s n_s ln((delta+|x-p_s|^2) / (1+|x-p_s|^2)); finite
// everywhere for delta > 0, equal to u0 at delta = 0.
double u0_delta_eval(const StringConfiguration& cfg, const RegularizationParam& reg,
                     const Point2& x);

// F_delta(x) = prod_s (delta+|x-p_s|^2)^(-a n_s); +infinity sentinel at a
// center when delta = 0 and a > 0.
double F_delta_eval(const StringConfiguration& cfg, const RegularizationParam& reg,
                    double a, const Point2& x);

} // namespace sds

#endif
