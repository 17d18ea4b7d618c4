#include "cm/cli.hpp"

int main(int argc, char** argv) { return cm::cli::run(argc, argv); }
