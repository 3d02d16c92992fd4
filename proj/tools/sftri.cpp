#include "sftri/cli.hpp"

int main(int argc, char** argv) { return sftri::cli::run(argc, argv); }
