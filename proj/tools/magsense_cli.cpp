#include "magsense/cli/commands.hpp"

int main(int argc, char** argv) { return magsense::cli::run_command(argc, argv); }
