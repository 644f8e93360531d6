#include "ecoepi/cli.hpp"

int main(int argc, char** argv) { return ecoepi::cli::run(argc, argv); }
