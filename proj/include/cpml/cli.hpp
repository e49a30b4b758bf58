#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cpml {

/// Entry point behind the `cpml` executable. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cpml
