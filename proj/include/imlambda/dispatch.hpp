#pragma once

#include "imlambda/config.hpp"

#include <exception>
#include <ostream>
#include <string>
#include <vector>

namespace imlambda {

std::vector<std::string> subcommands();

/// Runs one subcommand and writes its CSV files into out_dir (created if needed).
/// Returns the written paths. Progress lines go to `log` when non-null.
std::vector<std::string> dispatch(const std::string& command, const RunConfig& config, const std::string& out_dir,
                                  std::ostream* log = nullptr);

/// 1 configuration, 2 numerical or domain, 3 I/O, 4 anything else.
int exit_code(const std::exception& e);

} // namespace imlambda
