#include "mvb/cli.h"

int main(int argc, char** argv) { return mvb::run_cli(argc, argv); }
