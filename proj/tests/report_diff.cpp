// Compares two report.json files with the timestamp removed.

#include <fstream>
#include <iostream>

#include <json.hpp>

#include "symred/verify.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: report_diff <a.json> <b.json>\n";
    return 2;
  }
  std::string canon[2];
  for (int i = 0; i < 2; ++i) {
    std::ifstream in(argv[i + 1]);
    if (!in) {
      std::cerr << "cannot open " << argv[i + 1] << '\n';
      return 2;
    }
    canon[i] = symred::verify::canonical_report(nlohmann::json::parse(in));
  }
  if (canon[0] != canon[1]) {
    std::cerr << "reports differ\n";
    return 1;
  }
  std::cout << "reports identical (" << canon[0].size() << " bytes without timestamp)\n";
  return 0;
}
