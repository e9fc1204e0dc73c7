// Writes the fixture inputs and regenerates their golden reports:
//   make_fixtures <fixtures-dir>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fixture_spaces.hpp"

namespace fs = std::filesystem;

namespace {

void write(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << bytes;
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <fixtures-dir>\n";
    return 2;
  }
  try {
    const fs::path dir = argv[1];
    fs::create_directories(dir / "golden");
    for (const auto& f : llk::fixtures::space_fixtures()) {
      write(dir / (f.name + ".json"), llk::serialize_space_file(f.file));
    }
    write(dir / "geodesics.json", llk::fixtures::geodesic_request());
    for (const auto& c : llk::fixtures::golden_cases()) {
      const llk::CommandResult r = llk::run_command(c.command, read(dir / (c.fixture + ".json")), llk::CliOptions{});
      write(dir / "golden" / c.golden(), r.output);
      std::cout << c.golden() << " exit " << r.exit_code << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
