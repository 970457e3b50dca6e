#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace weave {

using Environment = std::map<std::string, std::string>;

/// The process environment as a map.
Environment current_environment();

/// `weave render|check ...`; `args` excludes the program name. Returns the
/// process exit code: 0 success, 1 parse/config, 2 execution, 3 I/O.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err,
            const Environment &env = {});

}  // namespace weave
