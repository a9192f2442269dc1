#include "wavekk/cli.hpp"

int main(int argc, char** argv) { return wavekk::cli::run(argc, argv); }
