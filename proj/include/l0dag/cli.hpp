#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace l0dag {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// Subcommands: simulate | fit | represent | check | constants | experiment.
/// Returns 0 on success, 1 on usage or input errors, 2 on numerical failure.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace l0dag
