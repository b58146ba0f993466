// cli.hpp — command-line entry point, callable from tests.

#pragma once

namespace sshbath::cli {

int run(int argc, const char* const* argv);

}  // namespace sshbath::cli
