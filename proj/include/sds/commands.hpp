#ifndef SDS_COMMANDS_HPP
#define SDS_COMMANDS_HPP

#include "sds/config.hpp"

#include <iosfwd>

namespace sds {

// Batch commands behind the CLI. Each writes its artifacts under
// cfg.out_dir/cfg.basename and returns the process exit code:
// 0 ok, 1 numeric failure, 2 regime refusal, 3 config error.
int cmd_solve_planar(const JobConfig& cfg, std::ostream& log);
int cmd_solve_radial(const JobConfig& cfg, std::ostream& log);
int cmd_verify(const JobConfig& cfg, std::ostream& log);
int cmd_sweep(const JobConfig& cfg, std::ostream& log);

// Loads the config, dispatches by command name, maps exceptions to exit codes.
int run_command(const std::string& command, const std::string& config_path,
                std::ostream& log);

} // namespace sds

#endif
