#include "hypegrl/cli.hpp"

int main(int argc, char** argv) { return hypegrl::cli::run(argc, argv); }
