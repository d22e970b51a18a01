#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "burden/cost.hpp"
#include "burden/types.hpp"

namespace burden {

// Two-group 1-D Gaussian mixture: group z draws from N(mu_z, sigma_z) with
// sigma1 = sigma0 / 2; labels are Bernoulli with success probability
// (x + min(X_z)) / (max(X_z) + min(X_z)) computed from the realized group
// sample and clamped to [0, 1]. Deterministic given the seed.
Dataset generate_synthetic_1d(double mu0, double mu1, double sigma0,
                              int n_per_group, std::uint64_t seed);

// Aggregate score tables: per-group CDF over discrete scores plus the
// per-(group, score) probability of a positive label.
struct CdfTables {
  std::vector<int> scores;  // ascending
  std::vector<double> cdf0, cdf1;
  std::vector<double> p_pos0, p_pos1;

  // Monotone CDFs ending at 1 (1e-9), probabilities in [0, 1].
  void validate() const;
};

CdfTables load_cdf_tables(const std::string& path);
void save_cdf_tables(const CdfTables& tables, const std::string& path);

// Built-in synthetic surrogate for the public credit-score tables: group 0's
// scores are strictly dominated by group 1's, the positive-label probability
// is a shared logistic curve in the score.
CdfTables fico_surrogate_tables();

// Inverse-CDF sampling of count_z integer scores per group; labels Bernoulli
// per the table. Per individual the score is drawn before its label, group 0
// first. Deterministic given the seed.
Dataset sample_from_cdf_tables(const CdfTables& tables, std::int64_t count0,
                               std::int64_t count1, std::uint64_t seed);

// CSV with a header row: one column per feature, then y, then z.
Dataset load_csv_dataset(const std::string& path);
Dataset load_csv_dataset(const std::string& path, const FeatureSchema& expected);
void save_csv_dataset(const Dataset& data, const std::string& path);

// Per-feature (x - mean) / std with statistics from the training partition;
// population standard deviation. Throws ValidationError on zero variance.
std::vector<NormPair> normalize_fit(const Dataset& train);
void normalize_apply(Dataset& data, const std::vector<NormPair>& stats);
std::vector<NormPair> normalize_fit_apply(Dataset& train, std::vector<Dataset*> others);

// Uniform partition without replacement; test gets floor(n * fraction)
// samples. Fisher-Yates over indices with j = next_u64() % (i + 1); partitions
// keep the original relative order.
std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double test_fraction,
                                             std::uint64_t seed);

// Bundled 9-feature synthetic stand-in for the income-survey experiment:
// three manipulable features (worker_class, occupation, hours_per_week) with
// group 0 shifted lower on the predictive ones.
Dataset make_adult_surrogate(int n, std::uint64_t seed);

// Cost model of the income experiment: 100 / 10 / 1 on the manipulable
// features, infinite elsewhere, group 0 paying twice group 1's rate.
LinearCostMultiD adult_surrogate_cost();

}  // namespace burden
