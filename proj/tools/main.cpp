#include "cli/cli.hpp"

int main(int argc, char** argv) { return ftlsim::cli::cli_main(argc, argv); }
