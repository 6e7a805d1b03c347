#include "gp/cli/commands.hpp"

int main(int argc, char** argv) { return gp::cli::run(std::vector<std::string>(argv, argv + argc)); }
