#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace navth::cli {

/// Runs the navth command line. Errors are reported as one JSON record on
/// `err`; the return value is nonzero exactly when such a record was written.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace navth::cli
