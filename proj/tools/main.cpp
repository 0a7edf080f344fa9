#include "replidyn/cli.hpp"

int main(int argc, char** argv) { return replidyn::cli_main(argc, argv); }
