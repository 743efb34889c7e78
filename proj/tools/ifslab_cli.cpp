#include "run_config.hpp"

int main(int argc, char** argv) { return ifslab::cli::main_entry(argc, argv); }
