#include <string>
#include <vector>

#include "lrsdp/cli/cli.hpp"

int main(int argc, char** argv) {
  return lrsdp::cli::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
