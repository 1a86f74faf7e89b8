#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <string>

#include "cpd/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("cpd-cli-" + std::to_string(std::rand()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(CPD_BINARY) + " " + args + " > " + (dir / "stdout").string() + " 2> " +
                            (dir / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  std::string read(const std::string& name) const { return cpd::read_file(dir / name); }
};

}  // namespace

TEST_CASE("cli pipeline is byte-for-byte repeatable") {
  Sandbox box;
  const std::string gen = "generate --sources 2 --relays 1 --horizon 14400 --seed 5 -o ";
  REQUIRE(box.run(gen + box.path("a.json")) == 0);
  REQUIRE(box.run(gen + box.path("b.json")) == 0);
  CHECK(box.read("a.json") == box.read("b.json"));

  REQUIRE(box.run("reduce " + box.path("a.json") + " -o " + box.path("r1.txt")) == 0);
  REQUIRE(box.run("reduce " + box.path("a.json") + " -o " + box.path("r2.txt")) == 0);
  CHECK(box.read("r1.txt") == box.read("r2.txt"));
  CHECK(box.read("r1.txt").find("pruned_fraction") != std::string::npos);

  for (const std::string algo : {"greedy", "greedy_zrk", "fcp", "dte", "milp"}) {
    const std::string base = "schedule " + box.path("a.json") + " --algo " + algo + " --time-limit 2 ";
    REQUIRE(box.run(base + "-o " + box.path(algo + "1.json") + " --ion " + box.path(algo + "1.ion")) == 0);
    REQUIRE(box.run(base + "-o " + box.path(algo + "2.json") + " --ion " + box.path(algo + "2.ion")) == 0);
    CHECK(box.read(algo + "1.json") == box.read(algo + "2.json"));
    CHECK(box.read(algo + "1.ion") == box.read(algo + "2.ion"));
    REQUIRE(box.run("metrics " + box.path(algo + "1.json") + " --scenario " + box.path("a.json") + " -o " +
                    box.path(algo + "1.csv")) == 0);
    REQUIRE(box.run("metrics " + box.path(algo + "2.json") + " --scenario " + box.path("a.json") + " -o " +
                    box.path(algo + "2.csv")) == 0);
    CHECK(box.read(algo + "1.csv") == box.read(algo + "2.csv"));
    CHECK(box.read(algo + "1.csv").rfind(cpd::metrics_csv_header(), 0) == 0);
  }
  REQUIRE(box.run("metrics " + box.path("greedy1.json")) == 0);
  CHECK(box.read("stdout").find("duty_cycle_pct") != std::string::npos);

  const std::string cmp = "compare --sources 2 --relays 0,1 --horizon 14400 --time-limit 2 --out ";
  REQUIRE(box.run(cmp + box.path("c1")) == 0);
  REQUIRE(box.run(cmp + box.path("c2")) == 0);
  for (const auto& entry : fs::recursive_directory_iterator(box.dir / "c1")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), box.dir / "c1");
    CHECK_MESSAGE(cpd::read_file(entry.path()) == cpd::read_file(box.dir / "c2" / rel), rel.string());
  }
  CHECK(fs::exists(box.dir / "c1" / "report.csv"));
}

TEST_CASE("cli exit codes") {
  Sandbox box;
  CHECK(box.run("schedule " + box.path("missing.json")) != 0);
  cpd::write_file_atomic(box.path("bad.json"), "{ nope");
  CHECK(box.run("schedule " + box.path("bad.json")) == 2);
  REQUIRE(box.run("generate --sources 1 --relays 0 --horizon 7200 -o " + box.path("s.json")) == 0);
  REQUIRE(box.run("schedule " + box.path("s.json") + " -o " + box.path("p.json")) == 0);
  // A plan whose header disagrees with its entries is rejected.
  auto plan = box.read("p.json");
  const auto at = plan.find("\"objective\": ");
  REQUIRE(at != std::string::npos);
  plan.insert(at + 13, "1");
  cpd::write_file_atomic(box.path("p2.json"), plan);
  CHECK(box.run("metrics " + box.path("p2.json") + " --scenario " + box.path("s.json")) == 2);
  CHECK(box.run("schedule " + box.path("s.json") + " --epsilon 2") == 2);
}
