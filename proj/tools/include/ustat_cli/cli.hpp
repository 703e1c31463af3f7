#pragma once

#include <iosfwd>

namespace ustat::cli {

// Exit codes: 0 success, 1 a checked assertion failed, 2 usage or config error.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ustat::cli
