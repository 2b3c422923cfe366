#include <string>
#include <vector>

#include "taskfc/cli.hpp"

int main(int argc, char** argv) {
  return taskfc::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
