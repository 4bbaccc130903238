#include "oxide/cli.hpp"

int main(int argc, char** argv) { return oxide::cli_main(argc, argv); }
