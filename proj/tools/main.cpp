#include "nulltank/cli.hpp"

int main(int argc, char** argv) { return nulltank::run_cli(argc, argv); }
