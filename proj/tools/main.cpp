// stringsolver — CLI for self-dual string solutions of the generalized
// gauge-field model: multi-center planar solves, critical-coupling radial
// solves, invariant verification, and (N, m) sweeps.

#include "sds/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv)
{
    CLI::App app{"self-dual cosmic string solver"};
    app.require_subcommand(1);

    std::string config_path;
    const char* names[] = {"solve-planar", "solve-radial", "verify", "sweep"};
    const char* blurbs[] = {
        "solve the multi-center planar equation by monotone iteration and "
        "delta continuation",
        "solve the coincident-center critical-coupling problem via the "
        "log-radius reduction",
        "re-check solution invariants on an artifact (or a fresh solve)",
        "radial solves over the Cartesian product of N and m lists"};
    for (int i = 0; i < 4; ++i) {
        auto* sub = app.add_subcommand(names[i], blurbs[i]);
        sub->add_option("config", config_path, "job configuration file")->required();
    }

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    return sds::run_command(command, config_path, std::cout);
}
