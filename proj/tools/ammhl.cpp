#include "ammhl/cli.hpp"

int main(int argc, char** argv) { return ammhl::cli_main(argc, argv); }
