#include "lightts/experiment.hpp"

int main(int argc, char** argv) { return lightts::run_cli(argc, argv); }
