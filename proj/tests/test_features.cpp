#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "mhaec/features.hpp"
#include "mhaec/rng.hpp"

using mhaec::EventClass;
using mhaec::EventRecord;
using mhaec::FeatureVector;
using mhaec::StatsVector;

namespace {

StatsVector sv(double pm, double ps, double pd, double um = 0.0, double us = 0.0) {
  return {pm, ps, pd, um, us, 0};
}

EventRecord record(EventClass label, const std::array<double, 15>& v, std::uint64_t seed = 0) {
  EventRecord r;
  r.label = label;
  r.features.v = v;
  r.seed = seed;
  return r;
}

}  // namespace

TEST_CASE("extract_features") {
  SECTION("constant trajectory has zero variance and range") {
    std::vector<StatsVector> traj(10, sv(0.5, 0.4, 0.1, 0.02, 0.03));
    const FeatureVector f = mhaec::extract_features(traj);
    REQUIRE(f.v.size() == 15);
    REQUIRE(f.v[0] == Catch::Approx(0.5).epsilon(1e-15));
    REQUIRE(f.v[3] == Catch::Approx(0.4).epsilon(1e-15));
    REQUIRE(f.v[6] == Catch::Approx(0.1).epsilon(1e-15));
    REQUIRE(f.v[9] == Catch::Approx(0.02).epsilon(1e-15));
    REQUIRE(f.v[12] == Catch::Approx(0.03).epsilon(1e-15));
    for (std::size_t e = 0; e < 5; ++e) {
      REQUIRE(f.v[3 * e + 1] == Catch::Approx(0.0).margin(1e-30));  // variance
      REQUIRE(f.v[3 * e + 2] == 0.0);                               // range
    }
  }

  SECTION("two-frame hand example") {
    const std::vector<StatsVector> traj{sv(0.2, 0.5, 0.3), sv(0.6, 0.1, 0.3)};
    const FeatureVector f = mhaec::extract_features(traj);
    REQUIRE(f.v[0] == Catch::Approx(0.4).epsilon(1e-12));   // mean P_m
    REQUIRE(f.v[1] == Catch::Approx(0.04).epsilon(1e-12));  // population var
    REQUIRE(f.v[2] == Catch::Approx(0.4).epsilon(1e-12));   // range
  }

  SECTION("short trajectories are rejected") {
    std::vector<StatsVector> one(1, sv(1, 0, 0));
    REQUIRE_THROWS_AS(mhaec::extract_features(one), std::invalid_argument);
    REQUIRE_THROWS_AS(mhaec::extract_features({}), std::invalid_argument);
  }

  SECTION("exactly permutation invariant") {
    mhaec::Rng rng(5);
    std::vector<StatsVector> traj;
    for (int i = 0; i < 257; ++i)
      traj.push_back(sv(rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(),
                        rng.uniform()));
    const FeatureVector base = mhaec::extract_features(traj);
    std::mt19937 shuffler(99);
    for (int round = 0; round < 5; ++round) {
      std::shuffle(traj.begin(), traj.end(), shuffler);
      const FeatureVector f = mhaec::extract_features(traj);
      REQUIRE(f.v == base.v);
    }
  }

  SECTION("scaling one element scales mean/range linearly and variance quadratically") {
    mhaec::Rng rng(6);
    std::vector<StatsVector> traj, scaled;
    const double a = 2.0;  // power of two keeps float scaling exact
    for (int i = 0; i < 100; ++i) {
      const double um = 0.4 * rng.uniform();
      traj.push_back(sv(0.5, 0.5, 0.0, um, 0.0));
      scaled.push_back(sv(0.5, 0.5, 0.0, a * um, 0.0));
    }
    const FeatureVector f = mhaec::extract_features(traj);
    const FeatureVector g = mhaec::extract_features(scaled);
    REQUIRE(g.v[9] == Catch::Approx(a * f.v[9]).epsilon(1e-15));
    REQUIRE(g.v[10] == Catch::Approx(a * a * f.v[10]).epsilon(1e-12));
    REQUIRE(g.v[11] == Catch::Approx(a * f.v[11]).epsilon(1e-15));
  }
}

TEST_CASE("zscore") {
  SECTION("identical vectors normalize to zero") {
    std::vector<EventRecord> data(4, record(EventClass::SteadyState, {}));
    for (auto& r : data) r.features.v.fill(3.25);
    const auto params = mhaec::zscore_fit(data);
    const FeatureVector out = mhaec::zscore_apply(params, data[0].features);
    for (double v : out.v) REQUIRE(v == 0.0);
  }

  SECTION("two points map to -1 and +1") {
    std::array<double, 15> lo{}, hi{};
    hi.fill(2.0);
    const std::vector<EventRecord> data{record(EventClass::SteadyState, lo),
                                        record(EventClass::DoubleTalk, hi)};
    const auto params = mhaec::zscore_fit(data);
    const FeatureVector a = mhaec::zscore_apply(params, data[0].features);
    const FeatureVector b = mhaec::zscore_apply(params, data[1].features);
    for (double v : a.v) REQUIRE(v == Catch::Approx(-1.0).epsilon(1e-12));
    for (double v : b.v) REQUIRE(v == Catch::Approx(1.0).epsilon(1e-12));
  }

  SECTION("training set has zero mean after normalization") {
    mhaec::Rng rng(7);
    std::vector<EventRecord> data;
    for (int i = 0; i < 20; ++i) {
      std::array<double, 15> v;
      for (double& x : v) x = rng.gaussian() * 5.0 + 2.0;
      data.push_back(record(EventClass::SteadyState, v));
    }
    const auto params = mhaec::zscore_fit(data);
    std::array<double, 15> mean{};
    for (const auto& r : data) {
      const FeatureVector z = mhaec::zscore_apply(params, r.features);
      for (std::size_t d = 0; d < 15; ++d) mean[d] += z.v[d];
    }
    for (double m : mean) REQUIRE(std::abs(m / 20.0) < 1e-9);
  }

  SECTION("empty dataset is rejected") {
    REQUIRE_THROWS_AS(mhaec::zscore_fit({}), std::invalid_argument);
  }
}

TEST_CASE("knn_classify") {
  SECTION("k = 1 returns the label of an exact match") {
    std::vector<EventRecord> train;
    mhaec::Rng rng(9);
    for (int i = 0; i < 12; ++i) {
      std::array<double, 15> v;
      for (double& x : v) x = rng.gaussian();
      train.push_back(
          record(static_cast<EventClass>(i % 4), v, static_cast<std::uint64_t>(i)));
    }
    for (const auto& r : train)
      REQUIRE(mhaec::knn_classify(train, r.features, 1) == r.label);
  }

  SECTION("ties fall back to summed distance, then enum order") {
    // two labels, one point each, equidistant from the query
    std::array<double, 15> a{}, b{};
    a[0] = 1.0;
    b[0] = -1.0;
    const std::vector<EventRecord> train{record(EventClass::Repositioning, a),
                                         record(EventClass::DoubleTalk, b)};
    // exact tie resolves to the smaller enum (DoubleTalk < Repositioning)
    REQUIRE(mhaec::knn_classify(train, FeatureVector{}, 2) == EventClass::DoubleTalk);
    // nudge the query toward Repositioning and the summed distance wins
    FeatureVector q;
    q.v[0] = 0.25;
    REQUIRE(mhaec::knn_classify(train, q, 2) == EventClass::Repositioning);
  }

  SECTION("well separated clusters classify perfectly") {
    mhaec::Rng rng(11);
    std::vector<EventRecord> data;
    for (int cls = 0; cls < 4; ++cls) {
      std::array<double, 15> center{};
      for (double& x : center) x = rng.gaussian() * 0.5;
      center[static_cast<std::size_t>(cls)] += 10.0;  // separation >= 10x the std of 1
      for (int i = 0; i < 20; ++i) {
        std::array<double, 15> v;
        for (std::size_t d = 0; d < 15; ++d) v[d] = center[d] + rng.gaussian();
        data.push_back(record(static_cast<EventClass>(cls), v));
      }
    }
    const auto loo = mhaec::evaluate_loo(data, 5);
    REQUIRE(loo.accuracy == 1.0);
    for (std::size_t t = 0; t < 4; ++t)
      for (std::size_t p = 0; p < 4; ++p)
        REQUIRE(loo.confusion[t][p] == (t == p ? 20 : 0));
  }

  SECTION("argument validation") {
    REQUIRE_THROWS_AS(mhaec::knn_classify({}, FeatureVector{}, 1), std::invalid_argument);
    const std::vector<EventRecord> one{record(EventClass::SteadyState, {})};
    REQUIRE_THROWS_AS(mhaec::knn_classify(one, FeatureVector{}, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(mhaec::knn_classify(one, FeatureVector{}, 0), std::invalid_argument);
  }
}

TEST_CASE("evaluate_loo") {
  SECTION("confusion sums to the dataset size") {
    mhaec::Rng rng(13);
    std::vector<EventRecord> data;
    for (int i = 0; i < 40; ++i) {
      std::array<double, 15> v;
      for (double& x : v) x = rng.gaussian();
      data.push_back(record(static_cast<EventClass>(i % 4), v));
    }
    const auto loo = mhaec::evaluate_loo(data, 5);
    int total = 0;
    for (const auto& row : loo.confusion)
      for (int n : row) total += n;
    REQUIRE(total == 40);
  }

  SECTION("random labels land near chance for balanced data") {
    mhaec::Rng rng(17);
    std::vector<EventRecord> data;
    for (int i = 0; i < 40; ++i) {
      std::array<double, 15> v;
      for (double& x : v) x = rng.gaussian();
      data.push_back(record(static_cast<EventClass>(i % 4), v));
    }
    std::vector<EventClass> labels(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) labels[i] = data[i].label;

    std::mt19937 shuffler(23);
    double acc_sum = 0.0;
    for (int perm = 0; perm < 100; ++perm) {
      std::shuffle(labels.begin(), labels.end(), shuffler);
      for (std::size_t i = 0; i < data.size(); ++i) data[i].label = labels[i];
      acc_sum += mhaec::evaluate_loo(data, 5).accuracy;
    }
    const double mean_acc = acc_sum / 100.0;
    INFO("mean accuracy over permutations: " << mean_acc);
    REQUIRE(mean_acc >= 0.10);
    REQUIRE(mean_acc <= 0.40);
  }

  SECTION("a class with fewer than two records is rejected") {
    std::vector<EventRecord> data;
    for (int i = 0; i < 6; ++i) data.push_back(record(static_cast<EventClass>(i % 3), {}));
    REQUIRE_THROWS_AS(mhaec::evaluate_loo(data, 2), std::invalid_argument);
  }
}

TEST_CASE("knn is invariant to a global rotation of the feature space") {
  // rotate in the (0, 1) plane by an arbitrary angle
  const double theta = 0.83;
  auto rotate = [&](FeatureVector f) {
    const double x = f.v[0], y = f.v[1];
    f.v[0] = std::cos(theta) * x - std::sin(theta) * y;
    f.v[1] = std::sin(theta) * x + std::cos(theta) * y;
    return f;
  };

  mhaec::Rng rng(29);
  std::vector<EventRecord> data, rotated;
  for (int i = 0; i < 60; ++i) {
    std::array<double, 15> v;
    for (double& x : v) x = rng.gaussian();
    EventRecord r = record(static_cast<EventClass>(i % 4), v);
    data.push_back(r);
    r.features = rotate(r.features);
    rotated.push_back(r);
  }
  for (int q = 0; q < 20; ++q) {
    std::array<double, 15> v;
    for (double& x : v) x = rng.gaussian();
    FeatureVector query;
    query.v = v;
    REQUIRE(mhaec::knn_classify(data, query, 5) ==
            mhaec::knn_classify(rotated, rotate(query), 5));
  }
}
