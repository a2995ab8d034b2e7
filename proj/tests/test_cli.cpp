#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "revival/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "revival");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = revival::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("revival_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// paper.cfg with some keys replaced or dropped (empty value drops the key)
fs::path variant(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& edits) {
  std::istringstream in(slurp(PAPER_CFG));
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    bool keep = true;
    for (const auto& [key, value] : edits)
      if (line.rfind(key + " ", 0) == 0) {
        keep = false;
        if (!value.empty()) out << key << " = " << value << '\n';
      }
    if (keep) out << line << '\n';
  }
  const fs::path p = dir / "test.cfg";
  std::ofstream(p) << out.str();
  return p;
}

int lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("params writes artifacts and a manifest") {
  const fs::path dir = scratch("params");
  const Result r = run({"params", "--config", PAPER_CFG, "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("sigma0 = 11.33") != std::string::npos);
  CHECK(fs::exists(dir / "params.csv"));
  const std::string manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("command=params") != std::string::npos);
  CHECK(manifest.find("config.w0_um=507") != std::string::npos);
  CHECK(manifest.find("params.csv") != std::string::npos);
}

TEST_CASE("usage and configuration errors exit with 2") {
  const fs::path dir = scratch("errors");
  CHECK(run({"params", "--config", variant(dir, {{"w0_um", ""}}).string(), "--out", dir.string()}).code == 2);
  const Result missing = run({"params", "--config", variant(dir, {{"w0_um", ""}}).string(), "--out", dir.string()});
  CHECK(missing.err.find("w0_um") != std::string::npos);
  {
    std::ofstream(dir / "unknown.cfg") << slurp(PAPER_CFG) << "colour = 3\n";
  }
  CHECK(run({"params", "--config", (dir / "unknown.cfg").string()}).code == 2);
  CHECK(run({"params", "--config", PAPER_CFG, "--bogus"}).code == 2);
  CHECK(run({"params"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"params", "--config", (dir / "absent.cfg").string()}).code == 2);
  CHECK(run({"frames", "gen", "--config", PAPER_CFG, "--out", dir.string(), "--frames", "0"}).code == 2);
  CHECK(run({"uncertainty-scan", "--config", PAPER_CFG, "--basis", "spin"}).code == 2);
}

TEST_CASE("distribution and scan commands") {
  const fs::path dir = scratch("scans");
  const fs::path cfg = variant(dir, {{"n_theta", "128"}, {"z_points", "8"}});
  CHECK(run({"position-dist", "--config", cfg.string(), "--out", dir.string(), "--z-mm", "2"}).code == 0);
  CHECK(fs::exists(dir / "position_dist.csv"));
  const Result a = run({"angle-dist", "--config", cfg.string(), "--out", dir.string(), "--z-mm", "500"});
  CHECK(a.code == 0);
  CHECK(a.out.find("peak offset = -3.14") != std::string::npos);
  CHECK(fs::exists(dir / "angle_dist.csv"));
  CHECK(run({"uncertainty-scan", "--config", cfg.string(), "--out", dir.string(), "--basis", "position"}).code == 0);
  CHECK(lines(dir / "uncertainty_scan.csv") == 9);
  CHECK(run({"epr-scan", "--config", cfg.string(), "--out", dir.string(), "--basis", "angle"}).code == 0);
  CHECK(lines(dir / "epr_scan.csv") == 9);
}

TEST_CASE("revival prints the crossing table") {
  const fs::path dir = scratch("revival");
  const fs::path cfg = variant(dir, {{"n_theta", "128"}});
  const Result r = run({"revival", "--config", cfg.string(), "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("kind      z_cm") != std::string::npos);
  CHECK(r.out.find("loss") != std::string::npos);
  const auto at = r.out.find("revival");
  REQUIRE(at != std::string::npos);
  const double z_cm = std::stod(r.out.substr(at + 10));
  CHECK(z_cm == doctest::Approx(22.0).epsilon(0.10));
  CHECK(fs::exists(dir / "revival.csv"));
  CHECK(fs::exists(dir / "revival_crossings.csv"));
}

TEST_CASE("oam spectrum") {
  const fs::path dir = scratch("oam");
  const Result r = run({"oam-spectrum", "--config", PAPER_CFG, "--out", dir.string(), "--z-mm", "400"});
  CHECK(r.code == 0);
  CHECK(slurp(dir / "oam_spectrum.csv").rfind("l,probability\n", 0) == 0);
  CHECK(lines(dir / "oam_spectrum.csv") == 32);
  CHECK(run({"oam-spectrum", "--config", PAPER_CFG, "--out", dir.string(), "--z-mm", "100"}).code == 2);
}

TEST_CASE("frames gen and analyze") {
  const fs::path dir = scratch("frames");
  const fs::path cfg = variant(dir, {{"width", "64"}, {"height", "64"}, {"sectors", "16"}});
  const Result g = run({"frames", "gen", "--config", cfg.string(), "--out", dir.string(), "--frames", "3000"});
  REQUIRE(g.code == 0);
  REQUIRE(fs::exists(dir / "frames.spdc"));
  CHECK(fs::file_size(dir / "frames.spdc") == 56 + 3000ull * 64 * 64 * 2);
  const Result a = run({"frames", "analyze", "--config", cfg.string(), "--out", dir.string(), "--input",
                        (dir / "frames.spdc").string()});
  CHECK(a.code == 0);
  CHECK(a.out.find("position:") != std::string::npos);
  CHECK(a.out.find("angle:") != std::string::npos);
  CHECK(slurp(dir / "strip_map.csv").rfind("i,j,coord_i,coord_j,true,accidental,net,excluded\n", 0) == 0);
  CHECK(fs::exists(dir / "sector_map.csv"));
  CHECK(slurp(dir / "manifest.txt").find("command=frames analyze") != std::string::npos);

  std::ofstream(dir / "broken.spdc") << "SPDCFRM1 too short";
  CHECK(run({"frames", "analyze", "--config", cfg.string(), "--out", dir.string(), "--input",
             (dir / "broken.spdc").string()})
            .code == 1);
}
