#pragma once

#include <iosfwd>

namespace revival::cli {

/// Exit status: 0 success, 1 computation failure, 2 usage or configuration error.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace revival::cli
