#include "burden/cli.hpp"

int main(int argc, char** argv) { return burden::cli_main(argc, argv); }
