#include "saffine_cli.hpp"

int main(int argc, char** argv) { return saffine::cli::run(argc, argv); }
