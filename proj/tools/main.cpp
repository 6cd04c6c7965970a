#include "batchbald/cli.hpp"

int main(int argc, char** argv) { return batchbald::run_cli(argc, argv); }
