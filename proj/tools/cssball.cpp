#include "cssball/cli.hpp"

int main(int argc, char** argv) { return cssball::cli::run(argc, argv); }
