#pragma once

#include <iosfwd>

namespace lzs {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitRuntime = 2,
  kExitPartial = 3,
};

/// Entry point of the `lzs` tool: subcommands trace, sweep-map, current-map,
/// regimes, resonance and lz-check. Errors go to `err` as "error[kind]: message".
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lzs
