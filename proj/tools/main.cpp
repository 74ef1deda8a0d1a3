#include "copter/cli.hpp"

int main(int argc, char** argv) { return copter::run_cli(argc, argv); }
