#include "expostat/cli.hpp"

int main(int argc, char** argv) { return expostat::cli::main_entry(argc, argv); }
