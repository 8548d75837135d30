#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return swflood::cli::execute(swflood::cli::parse_args(args));
  } catch (const swflood::cli::UsageExit& e) {
    (e.exit_code() == 0 ? std::cout : std::cerr) << e.what();
    return e.exit_code();
  }
}
