#include <vector>
#include <string>

#include "scherk/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return scherk::run_cli(args);
}
