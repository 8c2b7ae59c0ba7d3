#include "sirlevy/cli.hpp"

int main(int argc, char** argv) { return sirlevy::run_command(argc, argv); }
