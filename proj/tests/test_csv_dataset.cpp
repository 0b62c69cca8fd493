#include <doctest.h>

#include <Eigen/Dense>
#include <set>
#include <string>
#include <vector>

#include "cre/csv.hpp"
#include "cre/dataset.hpp"
#include "cre/errors.hpp"
#include "cre/simulation.hpp"
#include "test_support.hpp"

using namespace cre;
using test_support::TempDir;

TEST_CASE("load_dataset reads a small file") {
  TempDir tmp("cre-csv");
  test_support::write_file(tmp.file("d.csv"),
                           "y,z,x1,x2\n"
                           "1.5,1,0.1,7\n"
                           "2.5,0,0.2,8\n"
                           "3.5,1,0.3,9\n"
                           "4.5,0,0.4,10\n");
  const Dataset d = load_dataset(tmp.file("d.csv"), "y", "z");
  CHECK(d.n() == 4);
  CHECK(d.k() == 2);
  CHECK(d.column_names == std::vector<std::string>{"x1", "x2"});
  CHECK(d.y(0) == 1.5);
  CHECK(d.z(3) == 0);
  CHECK(d.x(2, 1) == 9.0);
  CHECK(d.n_treated() == 2);
  CHECK(d.n_control() == 2);
}

TEST_CASE("load_dataset rejects bad input with the right error kinds") {
  TempDir tmp("cre-csv");
  test_support::write_file(tmp.file("noz.csv"), "y,x1\n1,2\n");
  CHECK_THROWS_WITH_AS((void)load_dataset(tmp.file("noz.csv"), "y", "z"),
                       doctest::Contains("z"), Error);
  try {
    (void)load_dataset(tmp.file("noz.csv"), "y", "z");
  } catch (const Error& e) {
    CHECK(e.kind() == "schema error");
    CHECK(e.exit_code() == 3);
  }

  test_support::write_file(tmp.file("z2.csv"), "y,z,x1\n1,2,3\n2,0,4\n");
  try {
    (void)load_dataset(tmp.file("z2.csv"), "y", "z");
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == "validation error");
  }

  test_support::write_file(tmp.file("bad.csv"), "y,z,x1\n1,0,3\n2,1,oops\n");
  try {
    (void)load_dataset(tmp.file("bad.csv"), "y", "z");
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == "parse error");
    CHECK(std::string(e.what()).find("x1") != std::string::npos);  // names the column
  }

  test_support::write_file(tmp.file("gap.csv"), "y,z,x1\n1,0,\n");
  CHECK_THROWS_AS((void)load_dataset(tmp.file("gap.csv"), "y", "z"), Error);
}

TEST_CASE("DGP draw survives a save/load round trip bit for bit") {
  DgpSpec spec;
  spec.n = 200;
  spec.seed = 31;
  const auto [d, truth] = generate(spec);
  TempDir tmp("cre-roundtrip");
  save_dataset(d, tmp.file("dgp.csv"));
  const Dataset back = load_dataset(tmp.file("dgp.csv"), "y", "z");
  REQUIRE(back.n() == d.n());
  REQUIRE(back.k() == d.k());
  CHECK(back.column_names == d.column_names);
  for (int i = 0; i < d.n(); ++i) {
    CHECK(back.y(i) == d.y(i));  // exact: shortest round-trip formatting
    CHECK(back.z(i) == d.z(i));
    for (int j = 0; j < d.k(); ++j) CHECK(back.x(i, j) == d.x(i, j));
  }
}

TEST_CASE("write_csv/read_csv round trip awkward doubles exactly") {
  CsvTable t;
  t.column_names = {"a", "b"};
  t.values = {0.1, 1e-300, 1.0 / 3.0, 12345678.91210117, -0.0, 2e300};
  t.n_rows = 3;
  t.n_cols = 2;
  TempDir tmp("cre-csvrt");
  write_csv(tmp.file("t.csv"), t);
  const CsvTable back = read_csv(tmp.file("t.csv"));
  REQUIRE(back.n_rows == 3);
  REQUIRE(back.n_cols == 2);
  CHECK(back.column_names == t.column_names);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    CHECK(back.values[i] == t.values[i]);
  }
}

TEST_CASE("split_sample sizes, determinism and errors") {
  DgpSpec spec;
  spec.n = 100;
  spec.seed = 5;
  const auto [d, truth] = generate(spec);

  const SplitIndices s = split_sample(d, 0.25, 42);
  CHECK(s.discovery.size() == 25);
  CHECK(s.inference.size() == 75);
  CHECK(s.ratio == 0.25);
  CHECK(s.seed == 42);

  // disjoint union covering all rows, both ascending
  std::set<int> all(s.discovery.begin(), s.discovery.end());
  all.insert(s.inference.begin(), s.inference.end());
  CHECK(all.size() == 100);
  CHECK(*all.begin() == 0);
  CHECK(*all.rbegin() == 99);
  CHECK(std::is_sorted(s.discovery.begin(), s.discovery.end()));
  CHECK(std::is_sorted(s.inference.begin(), s.inference.end()));

  const SplitIndices again = split_sample(d, 0.25, 42);
  CHECK(again.discovery == s.discovery);
  CHECK(again.inference == s.inference);
  const SplitIndices other = split_sample(d, 0.25, 43);
  CHECK(other.discovery != s.discovery);

  CHECK_THROWS_AS((void)split_sample(d, 0.0, 1), Error);
  CHECK_THROWS_AS((void)split_sample(d, 1.0, 1), Error);
}

TEST_CASE("split_sample gives a 250/750 split at N=1000") {
  DgpSpec spec;
  spec.n = 1000;
  spec.seed = 6;
  const auto [d, truth] = generate(spec);
  const SplitIndices s = split_sample(d, 0.25, 7);
  CHECK(s.discovery.size() == 250);
  CHECK(s.inference.size() == 750);
}

TEST_CASE("each index lands in discovery with frequency close to the ratio") {
  DgpSpec spec;
  spec.n = 100;
  spec.seed = 8;
  const auto [d, truth] = generate(spec);
  std::vector<int> hits(100, 0);
  const int n_seeds = 1000;
  for (int s = 0; s < n_seeds; ++s) {
    const SplitIndices si = split_sample(d, 0.25, static_cast<std::uint64_t>(s));
    for (const int i : si.discovery) ++hits[static_cast<std::size_t>(i)];
  }
  for (const int h : hits) {
    const double freq = h / static_cast<double>(n_seeds);
    CHECK(freq > 0.18);
    CHECK(freq < 0.32);
  }
}

TEST_CASE("subset verifies index bounds") {
  DgpSpec spec;
  spec.n = 100;
  spec.seed = 5;
  const auto [d, truth] = generate(spec);
  CHECK_THROWS_AS((void)d.subset({0, 100}), Error);
  CHECK_THROWS_AS((void)d.subset({-1}), Error);
  const Dataset sub = d.subset({3, 1, 3});
  CHECK(sub.n() == 3);
  CHECK(sub.y(0) == d.y(3));
  CHECK(sub.y(1) == d.y(1));
  CHECK(sub.y(2) == d.y(3));
}
