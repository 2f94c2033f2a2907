#include "prodprice/cli.hpp"

int main(int argc, char** argv) { return prodprice::cli_main(argc, argv); }
