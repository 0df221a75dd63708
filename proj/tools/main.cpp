#include "dhnet/cli.hpp"

int main(int argc, char** argv) { return dhnet::run_cli(argc, argv); }
