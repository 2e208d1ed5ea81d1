#pragma once

#include <ostream>

namespace texmetrics {

/// Entry point of the command-line tool. Returns the process exit code:
/// 0 on success, 1 when analysis fails, 2 on usage errors.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace texmetrics
