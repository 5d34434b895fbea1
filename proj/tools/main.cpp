#include <string>
#include <vector>

#include "cbop/cli.hpp"

int main(int argc, char** argv) { return cbop::run_cli(std::vector<std::string>(argv + 1, argv + argc)); }
