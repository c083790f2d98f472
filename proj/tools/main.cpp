#include "proxyreach/cli.hpp"

int main(int argc, char** argv) { return proxyreach::run_cli(argc, argv); }
