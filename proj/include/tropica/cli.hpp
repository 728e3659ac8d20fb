#ifndef TROPICA_CLI_HPP
#define TROPICA_CLI_HPP

namespace tropica {

// Entry point for the command line front end. Returns the process exit code:
// 0 success, 1 input or usage error, 2 violated internal invariant.
int cli_main(int argc, const char* const* argv);

}  // namespace tropica

#endif
