#include <string>
#include <vector>

#include "hazardlens/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hazardlens::run_cli(args);
}
