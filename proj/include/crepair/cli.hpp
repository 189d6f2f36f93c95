#ifndef CREPAIR_CLI_HPP
#define CREPAIR_CLI_HPP

namespace crepair::cli {

/// Parse and execute one command line. Returns the process exit code:
/// 0 success, 2 input/usage validation failure, 3 numeric failure.
int run(int argc, const char* const* argv);

}  // namespace crepair::cli

#endif
