#include "cfo/cli.hpp"

int main(int argc, char** argv) { return cfo::run_cli(argc, argv); }
