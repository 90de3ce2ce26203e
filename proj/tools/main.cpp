#include <string>
#include <vector>

#include "chaosmab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return chaosmab::run_cli(args);
}
