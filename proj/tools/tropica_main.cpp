#include "tropica/cli.hpp"

int main(int argc, char** argv) { return tropica::cli_main(argc, argv); }
