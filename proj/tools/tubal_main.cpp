#include "cli_app.hpp"

int main(int argc, char** argv) { return tubal::cli::run_cli(argc, argv); }
