#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mtlab/error.hpp"
#include "mtlab/lab.hpp"
#include "mtlab/parallel.hpp"
#include "mtlab/suite.hpp"

using namespace mtlab;

TEST_SUITE("lab_cli") {
  TEST_CASE("config round-trip and validation") {
    LabConfig c;
    c.seed = 99;
    c.p = 3.0;
    c.outdir = "x/y";
    const auto back = config_from_json(config_to_json(c));
    CHECK(back.seed == 99);
    CHECK(back.p == 3.0);
    CHECK(back.outdir == "x/y");
    CHECK(config_to_json(back) == config_to_json(c));

    CHECK(config_from_json(nlohmann::json::object()).corpus_size == 1000);
    CHECK_THROWS_AS(config_from_json({{"bogus", 1}}), UsageError);
    CHECK_THROWS_AS(config_from_json({{"tau_num", -1.0}}), UsageError);
    CHECK_THROWS_AS(config_from_json({{"corpus_size", 0}}), UsageError);
    CHECK_THROWS_AS(config_from_json({{"format_version", 7}}), UsageError);
    CHECK(config_from_json({{"tau_num", 0.0}}).tau_num == 0.0);
  }

  TEST_CASE("number formatting is shortest round-trip") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(1.5) == "1.5");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1e-300) == "1e-300");
    const double x = 2.0 / 3.0;
    CHECK(std::stod(format_number(x)) == x);
  }

  TEST_CASE("csv files keep the body separate from the header") {
    CsvTable t({"a", "b"});
    t.add_row({1.0, 2.5});
    t.add_cells({"x", "3"});
    CHECK(t.body() == "a,b\n1,2.5\nx,3\n");
    CHECK(t.all_finite());
    t.add_row({std::nan(""), 1.0});
    CHECK_FALSE(t.all_finite());

    const auto path = (std::filesystem::temp_directory_path() / "mtlab_lab_test" / "deep" / "t.csv").string();
    LabConfig c;
    CsvTable u({"a"});
    u.add_row({4.0});
    write_csv(path, "test", c, u.body());
    CHECK(read_csv_body(path) == u.body());
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    CHECK(first.rfind("#", 0) == 0);
  }

  TEST_CASE("report exit code") {
    RunReport r;
    r.checks.push_back({"one", true, 0, 0, ""});
    CHECK(r.exit_code() == 0);
    r.checks.push_back({"two", false, 0, 0, ""});
    CHECK(r.exit_code() == 1);
    CHECK(r.to_json()["checks"].size() == 2);
  }

  TEST_CASE("parallel_for visits every index and rethrows") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                      if (i == 7) throw DomainError("boom");
                    }),
                    DomainError);
    CHECK(split_seed(1, 2) == split_seed(1, 2));
    CHECK(split_seed(1, 2) != split_seed(1, 3));
  }
}

TEST_SUITE("lab_cli") {
  TEST_CASE("zero numeric tolerance turns rounding into failures") {
    LabConfig c;
    c.corpus_size = 200;
    c.tau_num = 0.0;
    const auto lin = criterion_linearization(c);
    CHECK_FALSE(lin.check.passed);
    CHECK(lin.check.value > 0.0);
    c.tau_num = 1e-9;
    CHECK(criterion_linearization(c).check.passed);
  }

  TEST_CASE("criterion bodies repeat exactly and stay finite") {
    LabConfig c;
    c.corpus_size = 60;
    c.sharp_instances = 40;
    const auto a = criterion_sharp(c);
    const auto b = criterion_sharp(c);
    CHECK(a.body == b.body);
    CHECK(a.body.find("nan") == std::string::npos);
    CHECK(a.body.find("inf") == std::string::npos);
    c.seed += 1;
    CHECK(criterion_sharp(c).body != a.body);
  }
}
