#include "aoi_lab/cli.hpp"

int main(int argc, char** argv) { return aoi::run_cli(argc, argv); }
