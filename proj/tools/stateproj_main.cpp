#include "stateproj/cli.hpp"

int main(int argc, char** argv) { return stateproj::cli::run(argc, argv); }
