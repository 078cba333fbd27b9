#pragma once

// Clip-level features from a smoothed statistics trajectory (mean, variance
// and dynamic range of each element), with a small k-NN + leave-one-out
// evaluator to check class separability.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "mhaec/events.hpp"
#include "mhaec/stats.hpp"

namespace mhaec {

inline constexpr std::size_t kFeatureDim = 15;

// Layout: [mean, var, range] per element, elements ordered P_m, P_s, P_d,
// U_m, U_s.
struct FeatureVector {
  std::array<double, kFeatureDim> v{};
};

struct EventRecord {
  EventClass label = EventClass::SteadyState;
  FeatureVector features;
  std::uint64_t seed = 0;
};

inline FeatureVector extract_features(std::span<const StatsVector> traj) {
  if (traj.size() < 2)
    throw std::invalid_argument("extract_features: trajectory needs at least two frames");

  FeatureVector out;
  std::vector<double> series(traj.size());
  for (std::size_t elem = 0; elem < 5; ++elem) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const StatsVector& s = traj[i];
      series[i] = (elem == 0) ? s.p_m
                : (elem == 1) ? s.p_s
                : (elem == 2) ? s.p_d
                : (elem == 3) ? s.u_m
                              : s.u_s;
    }
    // Canonical summation order so the result is exactly permutation
    // invariant over frames.
    std::sort(series.begin(), series.end());
    const double n = static_cast<double>(series.size());
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
    double var = 0.0;
    for (double x : series) var += (x - mean) * (x - mean);
    var /= n;  // population variance
    out.v[3 * elem + 0] = mean;
    out.v[3 * elem + 1] = var;
    out.v[3 * elem + 2] = series.back() - series.front();
  }
  return out;
}

struct ZScoreParams {
  std::array<double, kFeatureDim> mean{};
  std::array<double, kFeatureDim> std_dev{};
};

inline ZScoreParams zscore_fit(std::span<const EventRecord> dataset) {
  if (dataset.empty()) throw std::invalid_argument("zscore_fit: empty dataset");
  ZScoreParams p;
  const double n = static_cast<double>(dataset.size());
  for (std::size_t d = 0; d < kFeatureDim; ++d) {
    double m = 0.0;
    for (const EventRecord& r : dataset) m += r.features.v[d];
    m /= n;
    double var = 0.0;
    for (const EventRecord& r : dataset) {
      const double diff = r.features.v[d] - m;
      var += diff * diff;
    }
    p.mean[d] = m;
    p.std_dev[d] = std::max(std::sqrt(var / n), 1e-12);
  }
  return p;
}

inline FeatureVector zscore_apply(const ZScoreParams& p, const FeatureVector& f) {
  FeatureVector out;
  for (std::size_t d = 0; d < kFeatureDim; ++d)
    out.v[d] = (f.v[d] - p.mean[d]) / p.std_dev[d];
  return out;
}

inline double squared_distance(const FeatureVector& a, const FeatureVector& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < kFeatureDim; ++d) {
    const double diff = a.v[d] - b.v[d];
    s += diff * diff;
  }
  return s;
}

// Majority vote over the k nearest records; ties go to the candidate label
// with the smallest summed distance, then to enum order.
inline EventClass knn_classify(std::span<const EventRecord> train, const FeatureVector& query,
                               int k = 5) {
  if (train.empty()) throw std::invalid_argument("knn_classify: empty training set");
  if (k < 1 || static_cast<std::size_t>(k) > train.size())
    throw std::invalid_argument("knn_classify: k out of range");

  std::vector<std::pair<double, std::size_t>> dist(train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    dist[i] = {squared_distance(train[i].features, query), i};
  std::sort(dist.begin(), dist.end());

  std::array<int, kEventClassCount> votes{};
  std::array<double, kEventClassCount> summed{};
  for (int i = 0; i < k; ++i) {
    const auto cls = static_cast<std::size_t>(train[dist[static_cast<std::size_t>(i)].second].label);
    votes[cls] += 1;
    summed[cls] += std::sqrt(dist[static_cast<std::size_t>(i)].first);
  }

  std::size_t best = 0;
  bool have_best = false;
  for (std::size_t c = 0; c < kEventClassCount; ++c) {
    if (votes[c] == 0) continue;
    if (!have_best || votes[c] > votes[best] ||
        (votes[c] == votes[best] && summed[c] < summed[best])) {
      best = c;
      have_best = true;
    }
  }
  return static_cast<EventClass>(best);
}

struct LooResult {
  double accuracy = 0.0;
  // confusion[true][predicted]
  std::array<std::array<int, kEventClassCount>, kEventClassCount> confusion{};
};

inline LooResult evaluate_loo(std::span<const EventRecord> dataset, int k = 5) {
  std::array<int, kEventClassCount> per_class{};
  for (const EventRecord& r : dataset) per_class[static_cast<std::size_t>(r.label)] += 1;
  for (std::size_t c = 0; c < kEventClassCount; ++c)
    if (per_class[c] < 2)
      throw std::invalid_argument("evaluate_loo: class '" +
                                  std::string(to_string(static_cast<EventClass>(c))) +
                                  "' has fewer than 2 records");

  LooResult result;
  std::vector<EventRecord> train;
  train.reserve(dataset.size() - 1);
  int correct = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    train.clear();
    for (std::size_t j = 0; j < dataset.size(); ++j)
      if (j != i) train.push_back(dataset[j]);
    const EventClass pred = knn_classify(train, dataset[i].features, k);
    result.confusion[static_cast<std::size_t>(dataset[i].label)][static_cast<std::size_t>(pred)] += 1;
    if (pred == dataset[i].label) ++correct;
  }
  result.accuracy = static_cast<double>(correct) / static_cast<double>(dataset.size());
  return result;
}

}  // namespace mhaec
