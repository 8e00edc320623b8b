#include "pathreg/cli/driver.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pathreg::cli::run_cli(std::move(args));
}
