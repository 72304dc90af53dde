#include "commands.hpp"

int main(int argc, char** argv) { return tnplan::cli::run(argc, argv); }
