#include "graphlaplace/cli.hpp"

int main(int argc, char** argv) { return graphlaplace::cli_main(argc, argv); }
