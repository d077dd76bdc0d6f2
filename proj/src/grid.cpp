#include "sds/grid.hpp"

#include <cmath>

namespace sds {

namespace {

constexpr double kNodeCollision = 1e-9;

bool center_on_node(const StringConfiguration& cfg, double R, double h, double ox,
                    double oy)
{
    for (const auto& c : cfg.centers()) {
        const double fi = (c.position.x - (-R + ox)) / h;
        const double fj = (c.position.y - (-R + oy)) / h;
        const double dx = (fi - std::round(fi)) * h;
        const double dy = (fj - std::round(fj)) * h;
        if (std::hypot(dx, dy) < kNodeCollision)
            return true;
    }
    return false;
}

} // namespace

Grid::Grid(double radius, int nodes_per_axis, const StringConfiguration& cfg)
    : R_(radius), n_(nodes_per_axis)
{
    if (!(R_ > 0.0) || !std::isfinite(R_))
        throw domain_error("Grid: radius must be positive");
    if (n_ < 3)
        throw domain_error("Grid: need at least 3 nodes per axis");
    if (cfg.max_center_norm() > R_ / 2.0)
        throw domain_error("Grid: radius too small, need max |p_s| <= R/2");
    h_ = 2.0 * R_ / (n_ - 1);
    if (center_on_node(cfg, R_, h_, 0.0, 0.0)) {
        ox_ = oy_ = h_ / 2.0;
        if (center_on_node(cfg, R_, h_, ox_, oy_))
            throw domain_error("Grid: centers collide with nodes even after the "
                               "half-spacing shift; adjust R or n");
    }
}

} // namespace sds
