#include "tcsde/commands.hpp"

int main(int argc, char** argv) { return tcsde::run_cli(argc, argv); }
