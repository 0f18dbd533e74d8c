#include "holosweep/cli.hpp"

int main(int argc, char** argv) { return holosweep::cli::run(argc, argv); }
