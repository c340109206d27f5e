#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "aiot/bench.hpp"
#include "aiot/image.hpp"
#include "support.hpp"
#include "tempdir.hpp"

using namespace aiot;

namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli(const test::TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string(AIOT_CLI) + " " + args + " > " + out.string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

}  // namespace

TEST_CASE("compress and decompress roundtrip a PGM") {
  test::TempDir dir;
  const auto img = test::scene_image(33, 21, 8);
  write_file(dir / "in.pgm", write_pgm(img));
  const auto in = (dir / "in.pgm").string();
  const auto packed = (dir / "in.aiot").string();
  const auto back = (dir / "back.pgm").string();

  auto r = cli(dir, "compress " + in + " " + packed + " --variant standard");
  REQUIRE(r.status == 0);
  const auto metrics = nlohmann::json::parse(r.out);
  CHECK(metrics["rmse"].get<double>() == 0.0);
  CHECK(metrics["compressed_total_bytes"].get<std::uint64_t>() == std::filesystem::file_size(packed));

  r = cli(dir, "decompress " + packed + " " + back);
  REQUIRE(r.status == 0);
  CHECK(slurp(back) == slurp(in));
}

TEST_CASE("cardinality through the CLI stays within the quantizer bound") {
  test::TempDir dir;
  test::Rng rng(6);
  write_file(dir / "in.pgm", write_pgm(test::random_image(rng, 25, 25)));
  auto r = cli(dir, "compress " + (dir / "in.pgm").string() + " " + (dir / "c.aiot").string() +
                        " --variant cardinality --levels 32");
  REQUIRE(r.status == 0);
  CHECK(nlohmann::json::parse(r.out)["rmse"].get<double>() <= 4.0);
  r = cli(dir, "decompress " + (dir / "c.aiot").string() + " " + (dir / "c.pgm").string());
  REQUIRE(r.status == 0);
  const auto out = load_pgm(read_file(dir / "c.pgm"));
  for (Eigen::Index i = 0; i < out.size(); ++i) CHECK(out.data()[i] % 8 == 4);
}

TEST_CASE("usage errors exit with status 2") {
  test::TempDir dir;
  write_file(dir / "in.pgm", write_pgm(test::scene_image(4, 4, 1)));
  const auto in = (dir / "in.pgm").string();
  CHECK(cli(dir, "compress " + in + " x.aiot --variant optimized --decimals 7").status == 2);
  CHECK(cli(dir, "compress " + in + " x.aiot --variant sparkly").status == 2);
  CHECK(cli(dir, "").status == 2);
  CHECK(cli(dir, "--help").status == 0);
}

TEST_CASE("corrupted artifacts fail with the section named") {
  test::TempDir dir;
  write_file(dir / "in.pgm", write_pgm(test::scene_image(9, 7, 3)));
  REQUIRE(cli(dir, "compress " + (dir / "in.pgm").string() + " " + (dir / "a.aiot").string()).status == 0);
  auto bytes = read_file(dir / "a.aiot");
  bytes.resize(bytes.size() - 3);
  write_file(dir / "cut.aiot", bytes);
  auto r = cli(dir, "decompress " + (dir / "cut.aiot").string() + " " + (dir / "o.pgm").string());
  CHECK(r.status == 1);
  CHECK(r.err.find("payload section") != std::string::npos);

  bytes = read_file(dir / "a.aiot");
  bytes[0] = 'Z';
  write_file(dir / "magic.aiot", bytes);
  r = cli(dir, "decompress " + (dir / "magic.aiot").string() + " " + (dir / "o.pgm").string());
  CHECK(r.status == 1);
  CHECK(r.err.find("header section") != std::string::npos);
}

TEST_CASE("bench writes CSV and a summary") {
  test::TempDir dir;
  std::filesystem::create_directories(dir / "data");
  for (int i = 0; i < 3; ++i) write_file(dir / "data" / ("s" + std::to_string(i) + ".pgm"), write_pgm(test::scene_image(12, 12, i)));
  const auto report = (dir / "report.csv").string();
  auto r = cli(dir, "bench " + (dir / "data").string() + " --variants standard,optimized --thresholds 3,4 --report " + report +
                        " --no-resources --jobs 2");
  REQUIRE(r.status == 0);
  const auto table = parse_csv(slurp(report));
  REQUIRE(table.size() == 1 + 3 * 3);
  CHECK(table[0].back() == "error");
  const auto summary = nlohmann::json::parse(slurp(report + ".summary.json"));
  CHECK(summary["aggregate"].size() == 3);

  const auto json_report = (dir / "report.json").string();
  r = cli(dir, "bench " + (dir / "data").string() + " --format json --report " + json_report);
  REQUIRE(r.status == 0);
  CHECK(nlohmann::json::parse(slurp(json_report))["rows"].size() == 3);
}
