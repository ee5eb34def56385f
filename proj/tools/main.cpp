#include "docape/cli.hpp"

int main(int argc, char** argv) { return docape::run(argc, argv); }
