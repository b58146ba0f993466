#include "cli.hpp"

int main(int argc, char** argv) { return sshbath::cli::run(argc, argv); }
