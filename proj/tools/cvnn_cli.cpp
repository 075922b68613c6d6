#include "cvnn/cli.hpp"

int main(int argc, char** argv) { return cvnn::run_cli(argc, argv); }
