#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cli.hpp"
#include "swflood/errors.hpp"

using namespace swflood::cli;
namespace fs = std::filesystem;

TEST_CASE("parse build-dsm") {
  const Command c = parse_args({"build-dsm", "--dtm", "a.asc", "--features", "f.txt", "--classes", "c.txt", "--out",
                                "o.asc", "--close-tolerance", "0.25"});
  const auto& b = std::get<BuildDsm>(c);
  CHECK(b.dtm == "a.asc");
  CHECK(b.features == "f.txt");
  CHECK(b.classes == "c.txt");
  CHECK(b.out == "o.asc");
  CHECK(b.close_tolerance == 0.25);
}

TEST_CASE("parse run") {
  const auto r = std::get<Run>(parse_args({"run", "--config", "x.cfg"}));
  CHECK(r.config == "x.cfg");
  CHECK_FALSE(r.blocks.has_value());
  const auto r4 = std::get<Run>(parse_args({"run", "--config", "x.cfg", "--blocks", "4"}));
  CHECK(r4.blocks == 4);
  CHECK_THROWS_AS(parse_args({"run", "--config", "x.cfg", "--blocks", "0"}), UsageExit);
}

TEST_CASE("parse validate") {
  const auto v = std::get<Validate>(parse_args({"validate", "--case", "stoker"}));
  CHECK(v.case_name == "stoker");
  CHECK(v.n == 400);
  CHECK(v.report.empty());
  const auto v2 = std::get<Validate>(parse_args({"validate", "--case", "ritter", "--n", "64", "--report", "r.csv"}));
  CHECK(v2.n == 64);
  CHECK(v2.report == "r.csv");
}

TEST_CASE("usage errors") {
  auto code = [](const std::vector<std::string>& args) {
    try {
      parse_args(args);
    } catch (const UsageExit& e) {
      return e.exit_code();
    }
    return -1;
  };
  CHECK(code({"--help"}) == 0);
  CHECK(code({"run", "--help"}) == 0);
  CHECK(code({}) != 0);
  CHECK(code({"frobnicate"}) != 0);
  CHECK(code({"run"}) != 0);
  CHECK(code({"run", "--config", "x", "--bogus"}) != 0);
  CHECK(code({"validate", "--case", "tsunami"}) != 0);
  CHECK(code({"validate", "--case", "ritter", "--n", "3"}) != 0);
}

TEST_CASE("block count precedence") {
  CHECK(resolve_blocks(3, "5", 7) == 3);
  CHECK(resolve_blocks(std::nullopt, "5", 7) == 5);
  CHECK(resolve_blocks(std::nullopt, nullptr, 7) == 7);
  CHECK(resolve_blocks(std::nullopt, "", 7) == 7);
  CHECK_THROWS_AS(resolve_blocks(std::nullopt, "many", 7), swflood::ConfigError);
  CHECK_THROWS_AS(resolve_blocks(std::nullopt, "0", 7), swflood::ConfigError);
}

TEST_CASE("execute maps failures to exit codes") {
  CHECK(execute(Run{"/nonexistent/scenario.cfg", std::nullopt}) == 1);
  const fs::path dir = fs::temp_directory_path() / "swflood_test_cli";
  fs::create_directories(dir);
  const fs::path report = dir / "stoker.csv";
  fs::remove(report);
  CHECK(execute(Validate{"stoker", 40, report.string()}) == 0);
  std::ifstream in(report);
  std::string header;
  std::getline(in, header);
  CHECK(header == "case,n,l1_h,l2_h,linf_h,l1_u,l2_u,linf_u,order_l1_h");
}
