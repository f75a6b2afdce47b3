#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hecke/commands.hpp"

using namespace hecke;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "hecke");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hecke-cli-test-" + name);
  fs::remove_all(dir);
  return dir;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("emit latex") {
  const fs::path dir = scratch("latex");
  REQUIRE(run({"emit", "--genus", "4", "--format", "latex", "--out", dir.string()}).code == 0);
  CHECK(slurp(dir / "genus4.tex").find("2p^2+4p+1") != std::string::npos);
}

TEST_CASE("emit json") {
  const fs::path dir = scratch("json");
  REQUIRE(run({"emit", "--genus", "4", "--out", dir.string()}).code == 0);
  const auto j = read_json(dir / "genus4.json");
  REQUIRE(j["K"].size() == 15);
  CHECK(j["K"][1]["terms"].empty());
  CHECK(j["K"][13]["terms"].empty());
  CHECK(j["Q"].size() == 16);
  CHECK(j["ktable_sha1"].get<std::string>().size() == 40);

  REQUIRE(run({"emit", "--genus", "1", "--out", dir.string()}).code == 0);
  const auto g1 = read_json(dir / "genus1.json");
  CHECK(g1["Q"].size() == 2);
  CHECK(poly_from_json(g1["P"]) == MultiPoly(1));
}

TEST_CASE("emit text") {
  const fs::path dir = scratch("text");
  REQUIRE(run({"emit", "--format", "text", "--out", dir.string()}).code == 0);
  CHECK(slurp(dir / "genus4.txt").find("K_13 = 0") != std::string::npos);
  CHECK(slurp(dir / "genus4.txt").find("K_0 = 1\n") != std::string::npos);
}

TEST_CASE("verify") {
  const fs::path dir = scratch("verify");
  CHECK(run({"verify", "funceq", "--out", dir.string()}).code == 0);
  const auto report = read_json(dir / "verify-funceq.json");
  CHECK(report["passed"] == true);
  CHECK(report["results"].size() == 15);
  CHECK_FALSE(report.contains("elapsed_ms"));
  CHECK(fs::exists(dir / "verify-funceq.timing.json"));

  const Run counts = run({"verify", "counts", "--p", "3", "--genus", "2", "--out", dir.string()});
  CHECK(counts.code == 0);
  CHECK(counts.out.find("count=40") != std::string::npos);

  const Run literal = run({"verify", "remark", "--form", "literal", "--out", dir.string()});
  CHECK(literal.code == 1);
  CHECK(read_json(dir / "verify-remark.json").contains("first_failure"));
  CHECK(run({"verify", "remark", "--out", dir.string()}).code == 0);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"verify", "nonsense", "--out", scratch("u").string()}).code == 2);
  CHECK(run({"emit", "--genus", "7"}).code == 2);
  CHECK(run({"verify", "funceq", "--sym", "bogus"}).code == 2);
  CHECK(run({"--budget", "10", "verify", "counts", "--out", scratch("b").string()}).code == 2);
}

TEST_CASE("reconstruct") {
  const fs::path dir = scratch("rec");
  const Run g1 = run({"reconstruct", "--genus", "1", "--out", dir.string()});
  CHECK(g1.code == 0);
  CHECK(g1.out.find("P_1 = 1\n") != std::string::npos);
  const Run g2 = run({"reconstruct", "--genus", "2", "--p", "3", "--out", dir.string()});
  CHECK(g2.code == 0);
  const auto rep = read_json(dir / "reconstruct-genus2.json");
  CHECK(poly_from_json(rep["numerator"]) ==
        1 - MultiPoly::monomial(Coefficient(1, 3), {0, 2, 1, 1, 0, 0, 2}));
}

TEST_CASE("cosets and classes") {
  const Run c = run({"cosets", "--genus", "1", "--p", "2", "--delta", "1"});
  CHECK(c.code == 0);
  CHECK(std::count(c.out.begin(), c.out.end(), '\n') == 3);
  const Run g = run({"classes", "--genus", "1", "--p", "2"});
  CHECK(g.code == 0);
  CHECK(g.err.find("count=") != std::string::npos);
}

TEST_CASE("git blob hash") {
  const fs::path dir = scratch("sha");
  fs::create_directories(dir);
  std::ofstream(dir / "f") << "hello\n";
  // git hash-object of "hello\n"
  CHECK(git_blob_sha1(dir / "f") == "ce013625030ba8dba906f756967f9e9ca394464a");
}
