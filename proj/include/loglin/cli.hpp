#pragma once

#include <iosfwd>

namespace loglin {

/// Entry point of the loglin-clp command-line tool. Streams are injected so
/// the commands can be driven in-process by tests. Exit codes: 0 success,
/// 1 no result (no proof tree / no parse), 2 usage, parse, or solver errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace loglin
