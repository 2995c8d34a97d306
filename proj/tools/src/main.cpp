#include "hyplab/lab.hpp"

int main(int argc, char** argv) { return hyplab::lab::run_cli(argc, argv); }
