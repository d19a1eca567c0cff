#include "qradon/cli.hpp"

int main(int argc, char** argv) { return qradon::run_cli(argc, argv); }
