#ifndef SDS_CONFIG_HPP
#define SDS_CONFIG_HPP

#include "sds/background.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sds {

// Parsed job configuration. Sections: model, centers, grid, delta, solver,
// radial, sweep, output, verify. Values left at "auto" stay unset here and
// are resolved by the command that runs the job.
struct JobConfig {
    std::optional<int> N;               // model.N; implied by centers when absent
    double m = 1.0;                     // model.m
    std::optional<double> a;            // model.a (or via model.G, a = 8 pi G)
    std::optional<double> g0;           // model.g0; unset = auto
    std::vector<StringCenter> centers;  // merged duplicates

    double grid_R = 12.0;
    int grid_n = 257;

    std::optional<std::vector<double>> delta_schedule; // unset = default schedule

    double tol = 1e-8;
    int max_iterations = 500;

    std::optional<double> t0;           // unset = auto (largest admissible)
    double t_end = 17.0;
    double step = 1e-3;
    double seed_tol = 1e-12;
    std::optional<std::pair<double, double>> fit_window; // unset = auto from |U|

    std::vector<int> sweep_N;
    std::vector<double> sweep_m;

    std::string out_dir = "out";
    std::string basename = "job";
    std::string verify_artifact;        // prefix of an existing dump, for verify

    bool operator==(const JobConfig& other) const;

    // Total string number: explicit N or the sum of center multiplicities.
    int total_N() const;
    // Coupling for the planar problem (0 when unset).
    double planar_a() const { return a.value_or(0.0); }
};

// Parses the key-value section grammar; throws config_error on unknown
// sections/keys or malformed values, regime_error when a*N > 1.
JobConfig parse_config(const std::string& text);

JobConfig load_config_file(const std::string& path);

// Canonical serialization, 17 significant digits; parse(serialize(c)) == c.
std::string serialize_config(const JobConfig& cfg);

// 17-significant-digit formatting used for every real in dumps.
std::string fmt17(double v);

} // namespace sds

#endif
