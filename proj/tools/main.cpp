#include "qsrc/cli.hpp"

int main(int argc, char** argv) { return qsrc::cli::run(argc, argv); }
