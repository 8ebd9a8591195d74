#pragma once

#include <iosfwd>

namespace noneq::experiments {

/// Exit status: 0 success, 1 runtime failure, 2 usage error, 3 an
/// experiment finished but one of its checks failed.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace noneq::experiments
