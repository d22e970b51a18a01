#include "burden/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "burden/io.hpp"
#include "burden/rng.hpp"

namespace burden {

Dataset generate_synthetic_1d(double mu0, double mu1, double sigma0,
                              int n_per_group, std::uint64_t seed) {
  if (!(sigma0 > 0.0)) throw ValidationError("sigma0 must be positive");
  if (n_per_group < 2) throw ValidationError("need at least 2 samples per group");

  Rng rng(seed);
  const double sigma[2] = {sigma0, sigma0 / 2.0};
  const double mu[2] = {mu0, mu1};

  std::vector<std::vector<double>> features(2);
  for (int z = 0; z < 2; ++z) {
    features[z].resize(static_cast<std::size_t>(n_per_group));
    for (double& x : features[z]) x = rng.normal(mu[z], sigma[z]);
  }

  Dataset data;
  data.schema.names = {"score"};
  data.schema.manipulable = {true};
  for (int z = 0; z < 2; ++z) {
    const auto [min_it, max_it] = std::minmax_element(features[z].begin(), features[z].end());
    const double lo = *min_it, hi = *max_it;
    for (double x : features[z]) {
      double p = (x + lo) / (hi + lo);
      p = std::min(std::max(p, 0.0), 1.0);
      Sample s;
      s.features = Eigen::VectorXd::Constant(1, x);
      s.label = rng.bernoulli(p) ? 1 : 0;
      s.group = z;
      data.samples.push_back(std::move(s));
    }
  }
  return data;
}

void CdfTables::validate() const {
  const std::size_t n = scores.size();
  if (n == 0) throw ValidationError("CDF tables are empty");
  if (cdf0.size() != n || cdf1.size() != n || p_pos0.size() != n || p_pos1.size() != n)
    throw ValidationError("CDF table columns have mismatched lengths");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (scores[i + 1] <= scores[i])
      throw ValidationError("scores must be strictly increasing");
  for (const auto* cdf : {&cdf0, &cdf1}) {
    double prev = 0.0;
    for (double value : *cdf) {
      if (value < prev - 1e-12)
        throw ValidationError("CDF is not monotone non-decreasing");
      prev = value;
    }
    if (std::abs(cdf->back() - 1.0) > 1e-9)
      throw ValidationError("CDF must end at 1 within 1e-9");
  }
  for (const auto* p : {&p_pos0, &p_pos1})
    for (double value : *p)
      if (value < 0.0 || value > 1.0)
        throw ValidationError("label probabilities must lie in [0, 1]");
}

CdfTables load_cdf_tables(const std::string& path) {
  const CsvContent csv = read_csv(path);
  const std::size_t c_score = csv.column("score");
  const std::size_t c_cdf0 = csv.column("cdf_group0");
  const std::size_t c_cdf1 = csv.column("cdf_group1");
  const std::size_t c_p0 = csv.column("p_positive_group0");
  const std::size_t c_p1 = csv.column("p_positive_group1");
  CdfTables t;
  for (const auto& row : csv.rows) {
    if (row.size() != csv.header.size())
      throw ParseError("CDF table row has wrong cell count in '" + path + "'");
    t.scores.push_back(static_cast<int>(parse_double(row[c_score])));
    t.cdf0.push_back(parse_double(row[c_cdf0]));
    t.cdf1.push_back(parse_double(row[c_cdf1]));
    t.p_pos0.push_back(parse_double(row[c_p0]));
    t.p_pos1.push_back(parse_double(row[c_p1]));
  }
  t.validate();
  return t;
}

void save_cdf_tables(const CdfTables& tables, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << "score,cdf_group0,cdf_group1,p_positive_group0,p_positive_group1\n";
  for (std::size_t i = 0; i < tables.scores.size(); ++i) {
    out << tables.scores[i] << ',' << format_double(tables.cdf0[i]) << ','
        << format_double(tables.cdf1[i]) << ',' << format_double(tables.p_pos0[i])
        << ',' << format_double(tables.p_pos1[i]) << '\n';
  }
}

CdfTables fico_surrogate_tables() {
  // Discretized Beta score weights; the density ratio between the groups is
  // monotone, so group 0 is strictly dominated at every interior score.
  CdfTables t;
  const int n = 100;
  std::vector<double> w0(n), w1(n);
  double sum0 = 0.0, sum1 = 0.0;
  for (int s = 1; s <= n; ++s) {
    const double x = static_cast<double>(s) / (n + 1);
    w0[s - 1] = std::pow(x, 0.8) * std::pow(1.0 - x, 2.0);    // Beta(1.8, 3.0)
    w1[s - 1] = std::pow(x, 2.2) * std::pow(1.0 - x, 1.2);    // Beta(3.2, 2.2)
    sum0 += w0[s - 1];
    sum1 += w1[s - 1];
  }
  double acc0 = 0.0, acc1 = 0.0;
  for (int s = 1; s <= n; ++s) {
    acc0 += w0[s - 1] / sum0;
    acc1 += w1[s - 1] / sum1;
    t.scores.push_back(s);
    t.cdf0.push_back(std::min(acc0, 1.0));
    t.cdf1.push_back(std::min(acc1, 1.0));
    const double p = 1.0 / (1.0 + std::exp(-(static_cast<double>(s) - 45.0) / 10.0));
    t.p_pos0.push_back(p);
    t.p_pos1.push_back(p);
  }
  t.cdf0.back() = 1.0;
  t.cdf1.back() = 1.0;
  t.validate();
  return t;
}

Dataset sample_from_cdf_tables(const CdfTables& tables, std::int64_t count0,
                               std::int64_t count1, std::uint64_t seed) {
  tables.validate();
  if (count0 < 0 || count1 < 0) throw ValidationError("counts must be non-negative");
  Rng rng(seed);
  Dataset data;
  data.schema.names = {"score"};
  data.schema.manipulable = {true};
  const std::int64_t counts[2] = {count0, count1};
  for (int z = 0; z < 2; ++z) {
    const std::vector<double>& cdf = z == 0 ? tables.cdf0 : tables.cdf1;
    const std::vector<double>& p_pos = z == 0 ? tables.p_pos0 : tables.p_pos1;
    for (std::int64_t i = 0; i < counts[z]; ++i) {
      const double u = rng.uniform01();
      const std::size_t idx = static_cast<std::size_t>(
          std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      const std::size_t bin = std::min(idx, tables.scores.size() - 1);
      Sample s;
      s.features = Eigen::VectorXd::Constant(1, static_cast<double>(tables.scores[bin]));
      s.label = rng.bernoulli(p_pos[bin]) ? 1 : 0;
      s.group = z;
      data.samples.push_back(std::move(s));
    }
  }
  return data;
}

namespace {

int parse_binary_cell(const std::string& cell, const char* what, std::size_t row,
                      const std::string& path) {
  if (cell == "0") return 0;
  if (cell == "1") return 1;
  throw ParseError("'" + path + "' row " + std::to_string(row) + ": " + what +
                   " must be 0 or 1, got '" + cell + "'");
}

}  // namespace

Dataset load_csv_dataset(const std::string& path) {
  const CsvContent csv = read_csv(path);
  if (csv.header.size() < 3)
    throw ParseError("'" + path + "' needs at least one feature column plus y and z");
  if (csv.header[csv.header.size() - 2] != "y" || csv.header.back() != "z")
    throw ParseError("'" + path + "' must end with columns y,z");
  Dataset data;
  const std::size_t n_features = csv.header.size() - 2;
  data.schema.names.assign(csv.header.begin(), csv.header.begin() + n_features);
  data.schema.manipulable.assign(n_features, true);
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    if (row.size() != csv.header.size())
      throw ParseError("'" + path + "' row " + std::to_string(r + 1) +
                       " has " + std::to_string(row.size()) + " cells, expected " +
                       std::to_string(csv.header.size()));
    Sample s;
    s.features.resize(static_cast<Eigen::Index>(n_features));
    for (std::size_t j = 0; j < n_features; ++j) {
      try {
        s.features[static_cast<Eigen::Index>(j)] = parse_double(row[j]);
      } catch (const ParseError&) {
        throw ParseError("'" + path + "' row " + std::to_string(r + 1) + " column '" +
                         csv.header[j] + "': not a number: '" + row[j] + "'");
      }
    }
    s.label = parse_binary_cell(row[n_features], "y", r + 1, path);
    s.group = parse_binary_cell(row[n_features + 1], "z", r + 1, path);
    data.samples.push_back(std::move(s));
  }
  return data;
}

Dataset load_csv_dataset(const std::string& path, const FeatureSchema& expected) {
  Dataset data = load_csv_dataset(path);
  if (data.schema.names != expected.names)
    throw SchemaError("'" + path + "' feature columns do not match the expected schema");
  data.schema = expected;
  data.validate();
  return data;
}

void save_csv_dataset(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  for (const auto& name : data.schema.names) out << name << ',';
  out << "y,z\n";
  for (const Sample& s : data.samples) {
    for (Eigen::Index j = 0; j < s.features.size(); ++j)
      out << format_double(s.features[j]) << ',';
    out << s.label << ',' << s.group << '\n';
  }
}

std::vector<NormPair> normalize_fit(const Dataset& train) {
  if (train.samples.empty()) throw ValidationError("cannot fit normalization on empty data");
  const std::size_t d = train.dimension();
  std::vector<NormPair> stats(d);
  const double n = static_cast<double>(train.samples.size());
  for (std::size_t j = 0; j < d; ++j) {
    const Eigen::Index col = static_cast<Eigen::Index>(j);
    double mean = 0.0;
    for (const Sample& s : train.samples) mean += s.features[col];
    mean /= n;
    double var = 0.0;
    for (const Sample& s : train.samples) {
      const double delta = s.features[col] - mean;
      var += delta * delta;
    }
    var /= n;
    if (!(var > 0.0))
      throw ValidationError("feature '" + train.schema.names[j] + "' has zero variance");
    stats[j] = NormPair{mean, std::sqrt(var)};
  }
  return stats;
}

void normalize_apply(Dataset& data, const std::vector<NormPair>& stats) {
  if (stats.size() != data.dimension())
    throw SchemaError("normalization statistics do not match data dimension");
  for (Sample& s : data.samples)
    for (std::size_t j = 0; j < stats.size(); ++j) {
      const Eigen::Index col = static_cast<Eigen::Index>(j);
      s.features[col] = (s.features[col] - stats[j].mean) / stats[j].stddev;
    }
  data.schema.normalization = stats;
}

std::vector<NormPair> normalize_fit_apply(Dataset& train, std::vector<Dataset*> others) {
  const std::vector<NormPair> stats = normalize_fit(train);
  normalize_apply(train, stats);
  for (Dataset* other : others)
    if (other) normalize_apply(*other, stats);
  return stats;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double test_fraction,
                                             std::uint64_t seed) {
  if (test_fraction < 0.0 || test_fraction > 1.0)
    throw ValidationError("test fraction must lie in [0, 1]");
  const std::size_t n = data.samples.size();
  const std::size_t n_test =
      static_cast<std::size_t>(std::floor(static_cast<double>(n) * test_fraction));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(order[i - 1], order[j]);
  }
  std::vector<char> in_test(n, 0);
  for (std::size_t i = 0; i < n_test; ++i) in_test[order[i]] = 1;
  Dataset train, test;
  train.schema = data.schema;
  test.schema = data.schema;
  for (std::size_t i = 0; i < n; ++i)
    (in_test[i] ? test : train).samples.push_back(data.samples[i]);
  return {std::move(train), std::move(test)};
}

Dataset make_adult_surrogate(int n, std::uint64_t seed) {
  if (n < 10) throw ValidationError("surrogate dataset needs at least 10 samples");
  Rng rng(seed);
  Dataset data;
  data.schema.names = {"worker_class", "occupation", "hours_per_week", "age",
                       "education_years", "married", "native_born", "gender",
                       "dependents"};
  data.schema.manipulable = {true, true, true, false, false, false, false, false, false};
  for (int i = 0; i < n; ++i) {
    const int z = rng.bernoulli(0.25) ? 0 : 1;
    Eigen::VectorXd x(9);
    x[0] = rng.normal(z == 0 ? 2.5 : 3.0, 1.2);    // worker_class
    x[1] = rng.normal(z == 0 ? 5.5 : 6.5, 2.5);    // occupation
    x[2] = rng.normal(z == 0 ? 39.5 : 42.0, 9.0);  // hours_per_week
    x[3] = rng.normal(40.0, 12.0);                 // age
    x[4] = rng.normal(z == 0 ? 11.8 : 13.0, 2.5);  // education_years
    x[5] = rng.bernoulli(z == 0 ? 0.55 : 0.62) ? 1.0 : 0.0;  // married
    x[6] = rng.bernoulli(0.85) ? 1.0 : 0.0;        // native_born
    x[7] = rng.bernoulli(0.5) ? 1.0 : 0.0;         // gender
    x[8] = rng.normal(1.2, 1.0);                   // dependents
    const double logit = 1.6 * (0.07 * (x[2] - 41.0) + 0.35 * (x[0] - 2.9) +
                                0.16 * (x[1] - 6.2) + 0.22 * (x[4] - 12.7) +
                                0.015 * (x[3] - 40.0) + 0.30 * (x[5] - 0.6) +
                                0.20 * (x[7] - 0.5) - 0.05);
    Sample s;
    s.features = std::move(x);
    s.label = rng.bernoulli(1.0 / (1.0 + std::exp(-logit))) ? 1 : 0;
    s.group = z;
    data.samples.push_back(std::move(s));
  }
  return data;
}

LinearCostMultiD adult_surrogate_cost() {
  Eigen::VectorXd d1(9);
  d1 << 100.0, 10.0, 1.0, kInfCost, kInfCost, kInfCost, kInfCost, kInfCost, kInfCost;
  const Eigen::VectorXd d0 = 2.0 * d1;
  return LinearCostMultiD(d0, d1);
}

}  // namespace burden
