#include "tada/cli/cli.hpp"

int main(int argc, char** argv) {
  return tada::cli::run(argc, argv);
}
