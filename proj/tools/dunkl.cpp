#include "dunkl/cli.hpp"

int main(int argc, char** argv) { return dunkl::run_cli(argc, argv); }
