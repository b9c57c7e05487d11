#include "cli.hpp"

int main(int argc, char** argv) { return vnps::cli::main_entry(argc, argv); }
