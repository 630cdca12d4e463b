#include "gefet/cli.hpp"

int main(int argc, char** argv) { return gefet::cli_main(argc, argv); }
