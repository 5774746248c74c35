#include <iostream>
#include <string>
#include <vector>

#include <stickbreak/cli/commands.hpp>

int main(int argc, char **argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return stickbreak::cli::run_cli(args, std::cout, std::cerr);
    } catch (const std::exception &e) {
        std::cerr << "fatal: " << e.what() << '\n';
        return 1;
    }
}
