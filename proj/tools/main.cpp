#include "biaxframe/cli.hpp"

int main(int argc, char** argv) { return biaxframe::run_cli(argc, argv); }
