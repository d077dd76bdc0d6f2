#ifndef SDS_GRID_HPP
#define SDS_GRID_HPP

#include "sds/background.hpp"

#include <cstddef>

namespace sds {

// Uniform Cartesian grid on [-R, R]^2, n nodes per axis, spacing 2R/(n-1).
// If a string center lands within 1e-9 of a node, the whole lattice is
// shifted by half a spacing so that F_delta and u0^delta stay well scaled
// as delta -> 0.
class Grid {
public:
    Grid(double radius, int nodes_per_axis, const StringConfiguration& cfg);

    double radius() const { return R_; }
    int n() const { return n_; }
    double spacing() const { return h_; }
    double offset_x() const { return ox_; }
    double offset_y() const { return oy_; }

    double x(int i) const { return -R_ + ox_ + i * h_; }
    double y(int j) const { return -R_ + oy_ + j * h_; }
    Point2 node(int i, int j) const { return {x(i), y(j)}; }

    bool on_boundary(int i, int j) const
    {
        return i == 0 || j == 0 || i == n_ - 1 || j == n_ - 1;
    }

    std::size_t index(int i, int j) const
    {
        return static_cast<std::size_t>(j) * n_ + i;
    }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

private:
    double R_;
    int n_;
    double h_;
    double ox_ = 0.0, oy_ = 0.0;
};

} // namespace sds

#endif
