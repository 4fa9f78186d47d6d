#include "exrobin/cli.hpp"

int main(int argc, char** argv) { return exrobin::cli_main(argc, argv); }
