#include <algorithm>
#include <map>

#include "doctest.h"
#include "fixtures.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "test_util.hpp"

using namespace attrscope;
using testutil::error_code;

namespace {

// One attribute whose group has the requested confusion counts.
Dataset with_counts(int tp, int tn, int fp, int fn) {
  std::vector<std::vector<int>> act;
  std::vector<std::vector<double>> prd;
  auto add = [&](int n, int a, double p) {
    for (int i = 0; i < n; ++i) {
      act.push_back({a});
      prd.push_back({p});
    }
  };
  add(tp, 1, 0.8);
  add(tn, 0, 0.2);
  add(fp, 0, 0.5);
  add(fn, 1, 0.3);
  return fixtures::make_dataset({"x"}, act, prd);
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("scores from counts") {
    auto ds = with_counts(3, 5, 1, 1);
    auto c = confusion(ds, ds.all(), 0);
    CHECK(c == ConfusionCounts{3, 5, 1, 1});
    auto s = scores(c);
    CHECK(*s.accuracy == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(*s.precision == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(*s.recall == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(*s.f1 == doctest::Approx(0.75).epsilon(1e-15));
  }

  TEST_CASE("zero denominators are undefined, not zero") {
    // Everything wrong, both directions: P = R = 0 so F1 is undefined.
    auto s = scores({0, 0, 4, 3});
    CHECK(*s.accuracy == 0.0);
    CHECK(*s.precision == 0.0);
    CHECK(*s.recall == 0.0);
    CHECK_FALSE(s.f1);

    // All true negatives.
    s = scores({0, 9, 0, 0});
    CHECK(*s.accuracy == 1.0);
    CHECK_FALSE(s.precision);
    CHECK_FALSE(s.recall);
    CHECK_FALSE(s.f1);

    // Only false negatives: precision undefined, recall 0.
    s = scores({0, 0, 0, 5});
    CHECK_FALSE(s.precision);
    CHECK(*s.recall == 0.0);
    CHECK_FALSE(s.f1);
  }

  TEST_CASE("counts partition the group") {
    auto ds = fixtures::random_dataset(3, 120, 9, 4);
    std::vector<std::size_t> group;
    for (std::size_t i = 0; i < ds.size(); i += 3) group.push_back(i);
    for (std::size_t a = 0; a < ds.attribute_count(); ++a) {
      auto c = confusion(ds, group, a);
      CHECK(c.total() == group.size());
      std::size_t tp = 0;
      for (auto i : group) {
        tp += ds.record(i).act[a] == 1 && ds.record(i).prd[a] >= 0.5;
      }
      CHECK(c.tp == tp);
    }
    std::vector<std::size_t> empty;
    CHECK(error_code([&] { confusion(ds, empty, 0); }) == "empty_group");
  }

  TEST_CASE("table is sorted by in-group positives, ties in catalog order") {
    auto ds = fixtures::make_dataset({"a", "b", "c", "d"},
                                     {{0, 1, 1, 0}, {0, 1, 0, 1}, {1, 1, 0, 1}});
    auto t = group_metrics_table(ds, ds.all());
    std::vector<std::size_t> order;
    for (const auto& r : t.rows) order.push_back(r.attribute);
    CHECK(order == std::vector<std::size_t>{1, 3, 0, 2});
    CHECK(t.rows[0].positives == 3);
    CHECK(t.rows[2].positives == 1);
  }

  TEST_CASE("error rate is the normalized Hamming distance") {
    auto names = fixtures::xray_attributes();
    std::vector<int> act(17, 0);
    std::vector<double> prd(17, 0.1);
    act[3] = 1;     // missed
    prd[7] = 0.95;  // spurious
    act[10] = 1;
    prd[10] = 0.5;  // hit on the threshold
    auto ds = fixtures::make_dataset(names, {act}, {prd});
    CHECK(error_rate(ds.record(0)) == doctest::Approx(2.0 / 17.0).epsilon(1e-15));
  }

  TEST_CASE("attribute set patterns partition the universe") {
    auto ds = fixtures::random_dataset(19, 400, 8, 3);
    std::vector<std::size_t> sel{1, 2, 4};
    auto patterns = attribute_set_patterns(ds, sel);

    // Brute force over the universe.
    std::map<std::vector<int>, std::size_t> expected;
    std::size_t universe = 0;
    for (const auto& r : ds.records()) {
      if (!std::all_of(sel.begin(), sel.end(), [&](auto a) { return r.act[a]; })) continue;
      ++universe;
      std::vector<int> key;
      for (auto a : sel) key.push_back(r.prd[a] >= 0.5);
      ++expected[key];
    }
    std::size_t total = 0;
    std::size_t prev_flags = 0;
    for (const auto& p : patterns) {
      std::vector<int> key;
      for (auto c : p.pattern) key.push_back(c == Correctness::Correct);
      CHECK(expected[key] == p.count);
      CHECK(p.images.size() == p.count);
      CHECK(p.correct_flags() >= prev_flags);
      prev_flags = p.correct_flags();
      total += p.count;
    }
    CHECK(total == universe);
    CHECK(patterns.size() == expected.size());

    std::vector<std::size_t> dup{1, 1};
    CHECK(error_code([&] { attribute_set_patterns(ds, dup); }) != "");
    std::vector<std::size_t> none;
    CHECK(error_code([&] { attribute_set_patterns(ds, none); }) != "");
  }

  TEST_CASE("rings fixture patterns") {
    auto ds = fixtures::rings_dataset();
    std::vector<std::size_t> sel{fixtures::kManyRings, fixtures::kRing,
                                 fixtures::kStrongScattering};
    auto patterns = attribute_set_patterns(ds, sel);
    std::map<std::string, std::size_t> got;
    std::size_t total = 0;
    for (const auto& p : patterns) {
      std::string key;
      for (auto c : p.pattern) key += c == Correctness::Correct ? '1' : '0';
      got[key] = p.count;
      total += p.count;
    }
    CHECK(total == 54);
    CHECK(got["111"] == 34);
    CHECK(got["000"] == 5);
    CHECK(got["011"] == 6);
    CHECK(got["110"] == 3);
    CHECK(patterns.front().correct_flags() == 0);
    CHECK(patterns.back().correct_flags() == 3);
  }
}
