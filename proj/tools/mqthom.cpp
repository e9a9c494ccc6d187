#include "mqthom/harness/cli.hpp"

int main(int argc, char** argv) { return mqthom::harness::cli_main(argc, argv); }
