#include "cli.hpp"

int main(int argc, char** argv) { return fisherspec::cli::run_cli(argc, argv); }
