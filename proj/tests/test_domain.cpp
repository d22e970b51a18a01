#include "doctest.h"

#include "burden/rng.hpp"
#include "burden/types.hpp"
#include "test_support.hpp"

using namespace burden;
using namespace burden::testing;

TEST_CASE("threshold classify uses the >= boundary convention") {
  const ThresholdClassifier f{3.0, 3.0};
  CHECK(classify(f, sample1d(3.0, 0, 0)) == 1);  // boundary point accepted
  CHECK(classify(f, sample1d(2.0, 0, 1)) == 0);
  CHECK(classify(f, sample1d(3.0000001, 1, 1)) == 1);
}

TEST_CASE("linear classify fires on u'x >= v_z") {
  LinearClassifier f;
  f.weights = vec({1.0, 2.0});
  f.v0 = 5.0;
  f.v1 = 5.0;
  CHECK(classify(f, sample_vec({1.0, 2.0}, 0, 0)) == 1);  // u'x = 5 = v0
  CHECK(classify(f, sample_vec({1.0, 1.9}, 0, 0)) == 0);
  f.v1 = 4.0;
  CHECK(classify(f, sample_vec({1.0, 1.9}, 0, 1)) == 1);  // group intercepts differ
}

TEST_CASE("classify rejects dimension mismatches") {
  const ThresholdClassifier t{1.0, 1.0};
  CHECK_THROWS_AS(classify(t, sample_vec({1.0, 2.0}, 0, 0)), SchemaError);
  LinearClassifier lin;
  lin.weights = vec({1.0, 1.0, 1.0});
  CHECK_THROWS_AS(classify(lin, sample_vec({1.0, 2.0}, 0, 0)), SchemaError);
}

TEST_CASE("evaluate_psi") {
  const SubPopCondition all{SubPop::All};
  const SubPopCondition pos{SubPop::PositiveLabel};
  CHECK(evaluate_psi(all, sample1d(7.0, 0, 0)));
  CHECK_FALSE(evaluate_psi(pos, sample1d(7.0, 0, 0)));
  CHECK(evaluate_psi(pos, sample1d(7.0, 1, 0)));
}

TEST_CASE("classify is pure and monotone") {
  Rng rng(11);
  const ThresholdClassifier t{2.5, 4.5};
  for (int trial = 0; trial < 200; ++trial) {
    const double x = rng.uniform(0.0, 10.0);
    const int z = rng.bernoulli(0.5) ? 1 : 0;
    const Sample s = sample1d(x, 0, z);
    const int first = classify(t, s);
    CHECK(classify(t, s) == first);
    // monotone non-decreasing in x
    CHECK(classify(t, sample1d(x + rng.uniform(0.0, 5.0), 0, z)) >= first);
  }

  LinearClassifier lin;
  lin.weights = vec({0.5, 1.5, 0.0});
  lin.v0 = 1.0;
  lin.v1 = 0.5;
  for (int trial = 0; trial < 200; ++trial) {
    Sample s = sample_vec({rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)},
                          0, rng.bernoulli(0.5) ? 1 : 0);
    const int before = classify(lin, s);
    Sample bumped = s;
    for (Eigen::Index j = 0; j < 3; ++j) bumped.features[j] += rng.uniform(0.0, 1.0);
    CHECK(classify(lin, bumped) >= before);  // u >= 0 componentwise
  }
}

TEST_CASE("dataset validation catches schema violations") {
  Dataset d = dataset1d({1.0, 2.0}, {3.0});
  CHECK_NOTHROW(d.validate());

  Dataset bad_label = d;
  bad_label.samples[0].label = 2;
  CHECK_THROWS_AS(bad_label.validate(), ValidationError);

  Dataset bad_dim = d;
  bad_dim.samples[1].features = vec({1.0, 2.0});
  CHECK_THROWS_AS(bad_dim.validate(), SchemaError);

  Dataset bad_norm = d;
  bad_norm.schema.normalization = {NormPair{0.0, 0.0}};
  CHECK_THROWS_AS(bad_norm.validate(), ValidationError);
}
