#include "ipp/cli.hpp"

int main(int argc, char** argv) { return ipp::run_cli(argc, argv); }
