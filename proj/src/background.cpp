#include "sds/background.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sds {

StringConfiguration::StringConfiguration(std::vector<StringCenter> centers)
{
    for (const auto& c : centers) {
        if (c.multiplicity < 1)
            throw domain_error("StringConfiguration: multiplicity must be >= 1");
        if (!std::isfinite(c.position.x) || !std::isfinite(c.position.y))
            throw domain_error("StringConfiguration: center coordinates must be finite");
        bool merged = false;
        for (auto& existing : centers_) {
            if (dist2(existing.position, c.position) <= kCenterProximity * kCenterProximity) {
                existing.multiplicity += c.multiplicity;
                merged = true;
                break;
            }
        }
        if (!merged)
            centers_.push_back(c);
    }
    total_ = 0;
    for (const auto& c : centers_)
        total_ += c.multiplicity;
}

StringConfiguration StringConfiguration::coincident(int N, Point2 p)
{
    if (N == 0)
        return StringConfiguration{};
    return StringConfiguration({StringCenter{p, N}});
}

double StringConfiguration::max_center_norm() const
{
    double best = 0.0;
    for (const auto& c : centers_)
        best = std::max(best, std::hypot(c.position.x, c.position.y));
    return best;
}

bool StringConfiguration::near_center(const Point2& x, double tol) const
{
    for (const auto& c : centers_)
        if (dist2(c.position, x) <= tol * tol)
            return true;
    return false;
}

double u0_eval(const StringConfiguration& cfg, const Point2& x)
{
    double sum = 0.0;
    for (const auto& c : cfg.centers()) {
        const double r2 = dist2(c.position, x);
        if (r2 <= kCenterProximity * kCenterProximity)
            return -std::numeric_limits<double>::infinity();
        sum += c.multiplicity * std::log(r2 / (1.0 + r2));
    }
    return sum;
}

double w0_eval(const StringConfiguration& cfg, const Point2& x)
{
    double sum = 0.0;
    for (const auto& c : cfg.centers())
        sum += c.multiplicity * std::log1p(dist2(c.position, x));
    return sum;
}

double source_g_eval(const StringConfiguration& cfg, const Point2& x)
{
    double sum = 0.0;
    for (const auto& c : cfg.centers()) {
        const double d = 1.0 + dist2(c.position, x);
        sum += 4.0 * c.multiplicity / (d * d);
    }
    return sum;
}

double u0_delta_eval(const StringConfiguration& cfg, const RegularizationParam& reg,
                     const Point2& x)
{
    const double delta = reg.delta;
    double sum = 0.0;
    for (const auto& c : cfg.centers()) {
        const double r2 = dist2(c.position, x);
        if (delta + r2 <= kCenterProximity * kCenterProximity)
            return -std::numeric_limits<double>::infinity();
        sum += c.multiplicity * std::log((delta + r2) / (1.0 + r2));
    }
    return sum;
}

double F_delta_eval(const StringConfiguration& cfg, const RegularizationParam& reg,
                    double a, const Point2& x)
{
    if (a < 0.0)
        throw domain_error("F_delta_eval: a must be >= 0");
    const double delta = reg.delta;
    double logsum = 0.0;
    for (const auto& c : cfg.centers()) {
        const double r2 = dist2(c.position, x);
        if (delta + r2 <= kCenterProximity * kCenterProximity)
            return (a > 0.0) ? std::numeric_limits<double>::infinity() : 1.0;
        logsum += c.multiplicity * std::log(delta + r2);
    }
    return std::exp(-a * logsum);
}

} // namespace sds
