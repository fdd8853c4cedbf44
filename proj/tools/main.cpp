#include "tnt/cli.hpp"

int main(int argc, char** argv) { return tnt::cli_main(argc, argv); }
