#include "dmca/cli.hpp"

int main(int argc, char** argv) { return dmca::run_cli(argc, argv); }
