#ifndef KRAKEN_CLI_HPP
#define KRAKEN_CLI_HPP

#include <string>
#include <vector>

namespace kraken::cli {

// Exit codes: 0 success, 1 usage, 2 bad input (files, schemas, ranges),
// 3 invariant or oracle failure.
int cli_main(int argc, const char *const *argv);

// Same, for tests: args without the program name.
int cli_main(const std::vector<std::string> &args);

} // namespace kraken::cli

#endif
