#include "platekit/cli.hpp"

int main(int argc, char** argv) {
  return platekit::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
