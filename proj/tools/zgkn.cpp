#include <clocale>
#include <iostream>

#include "zgkn/cli.hpp"

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  std::ios::sync_with_stdio(false);
  std::cout.imbue(std::locale::classic());
  return zgkn::cli::main_entry(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
