#ifndef TROPICA_SELFTEST_HPP
#define TROPICA_SELFTEST_HPP

#include <ostream>

namespace tropica {

// Replays a table of pinned reference computations and reports each line as
// ok or FAIL. Returns 0 when every line passes, 1 otherwise.
int run_selftest(std::ostream& out);

}  // namespace tropica

#endif
