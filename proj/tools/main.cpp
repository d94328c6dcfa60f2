#include <string>
#include <vector>

#include "de2gnn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return de2gnn::run_cli(args);
}
