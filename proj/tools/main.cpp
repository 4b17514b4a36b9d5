#include "nloc/cli.hpp"

int main(int argc, char** argv) { return nloc::cli::run(argc, argv); }
