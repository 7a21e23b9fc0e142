#pragma once

#include <iosfwd>

namespace spikelab {

// Exit codes: 0 success or --help, 1 computation or I/O error, 2 usage error.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spikelab
