#include "geostate/cli.hpp"

int main(int argc, char** argv) { return geostate::run_cli(argc, argv); }
