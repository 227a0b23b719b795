#include "latshell/cli.hpp"

int main(int argc, char** argv) {
    return latshell::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
