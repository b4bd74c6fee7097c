#include "scs/io.hpp"

int main(int argc, char** argv) { return scs::cli_main(argc, argv); }
