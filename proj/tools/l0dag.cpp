#include "l0dag/cli.hpp"

int main(int argc, char** argv) { return l0dag::cli_main(argc, argv); }
