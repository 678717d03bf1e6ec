#pragma once

#include <iosfwd>

namespace cgcn {

/// Entry point of the `cgcn` tool. Returns 0 on success, 1 on runtime
/// failures (including failed verification) and 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cgcn
