#include "pucci/app/cli.hpp"

int main(int argc, char** argv) { return pucci::app::run_command(argc, argv); }
