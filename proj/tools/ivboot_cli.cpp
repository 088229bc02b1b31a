#include "ivboot/cli.hpp"

int main(int argc, char** argv) { return ivboot::cli::run(argc, argv); }
