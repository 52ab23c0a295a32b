#include "lsqstab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return lsqstab::cli::main_entry(argc, argv, std::cout, std::cerr);
}
