#include "divlab/cli.hpp"

int main(int argc, char** argv) { return divlab::run(argc, argv); }
