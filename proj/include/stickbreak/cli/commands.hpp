#ifndef STICKBREAK_CLI_COMMANDS_HPP
#define STICKBREAK_CLI_COMMANDS_HPP

#include <ostream>
#include <string>
#include <vector>

namespace stickbreak::cli
{

// Exit codes shared by every subcommand.
inline constexpr int exit_pass = 0;
inline constexpr int exit_fail = 1;
inline constexpr int exit_usage = 2;

// args excludes the program name. Human summaries go to out, diagnostics to
// err; machine payloads only to the files named by flags.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace stickbreak::cli

#endif
