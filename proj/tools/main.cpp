#include "cli.hpp"

int main(int argc, char** argv) { return ewb::cli::run_main(argc, argv); }
