#include "reach/cli.hpp"

int main(int argc, char** argv) { return reach::cli::run(argc, argv); }
