#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"
#include "smol/calibrate.hpp"
#include "smol/errors.hpp"
#include "smol/model_io.hpp"

using namespace smol;
using namespace smol::calibrate;
using sweepproto::Measurement;

namespace {

// sweeps x levels measurements; rssi falls with vwc, ground truth attached.
std::vector<Measurement> synthetic_log(int sweeps, const std::vector<int>& levels,
                                       bool with_truth = true) {
  std::vector<Measurement> out;
  for (int s = 0; s < sweeps; ++s) {
    const double vwc = 5.0 + 3.0 * s;
    for (const int p : levels) {
      Measurement m;
      m.timestamp = 100 + s;
      m.device_id = 1;
      m.tx_power_dbm = p;
      m.rssi_dbm = p - 30.0 - 0.4 * vwc + 0.1 * ((s * 7 + p) % 5);
      m.height_cm = 0.0;
      m.depth_cm = 15.0;
      m.scenario = "t";
      if (with_truth) m.vwc_truth_pct = vwc;
      out.push_back(m);
    }
  }
  return out;
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> v(hi - lo + 1);
  std::iota(v.begin(), v.end(), lo);
  return v;
}

Dataset random_dataset(std::mt19937_64& gen, std::size_t n, std::size_t dims) {
  std::normal_distribution<double> z(0.0, 1.0);
  Dataset d;
  d.feature_names.resize(dims, "x");
  for (std::size_t i = 0; i < n; ++i) {
    Row r;
    for (std::size_t j = 0; j < dims; ++j) r.features.push_back(z(gen));
    r.target_pct = 20.0 + 5.0 * z(gen);
    r.group = std::to_string(i / 3);
    d.rows.push_back(r);
  }
  return d;
}

}  // namespace

TEST_CASE("assemble") {
  const auto log = synthetic_log(10, range(5, 22));
  const auto all = assemble(log, FeatureMode::AllTx);
  CHECK(all.size() == 180);
  CHECK(all.dimension() == 2);
  CHECK(all.rows[0].features == std::vector<double>{log[0].rssi_dbm, 5.0});

  const auto med = assemble(log, FeatureMode::MedianTx);
  CHECK(med.size() == 10);
  CHECK(med.dimension() == 1);
  CHECK(med.median_power_dbm == 13);

  CHECK_THROWS_AS(assemble(synthetic_log(2, range(5, 22), false), FeatureMode::AllTx),
                  ValidationError);
  CHECK_THROWS_AS(assemble({}, FeatureMode::AllTx), ValidationError);
  CHECK_THROWS_AS(assemble(log, FeatureMode::MedianTx, 30), ValidationError);
}

TEST_CASE("split partitions rows") {
  std::mt19937_64 gen(2);
  const auto d = random_dataset(gen, 10, 1);
  const auto [train, test] = split(d, {.train_fraction = 0.8, .seed = 9});
  CHECK(train.size() == 8);
  CHECK(test.size() == 2);
  std::multiset<double> in, out;
  for (const auto& r : d.rows) in.insert(r.target_pct);
  for (const auto& r : train.rows) out.insert(r.target_pct);
  for (const auto& r : test.rows) out.insert(r.target_pct);
  CHECK(in == out);

  const auto [train2, test2] = split(d, {.train_fraction = 0.8, .seed = 9});
  for (std::size_t i = 0; i < train.size(); ++i) {
    CHECK(train.rows[i].target_pct == train2.rows[i].target_pct);
  }

  Dataset one;
  one.feature_names = {"x"};
  one.rows.push_back({{1.0}, 1.0, "g"});
  CHECK_THROWS_AS(split(one, {}), ValidationError);
  CHECK_THROWS_AS(split(d, {.train_fraction = 1.0}), ValidationError);
  CHECK_THROWS_AS(split(d, {.train_fraction = 0.0}), ValidationError);
}

TEST_CASE("group split keeps sweeps together") {
  std::mt19937_64 gen(3);
  const auto d = random_dataset(gen, 30, 2);
  const auto [train, test] = split(d, {.train_fraction = 0.8, .seed = 1, .by_group = true});
  CHECK(train.size() + test.size() == 30);
  std::set<std::string> a, b;
  for (const auto& r : train.rows) a.insert(r.group);
  for (const auto& r : test.rows) b.insert(r.group);
  for (const auto& g : b) CHECK_FALSE(a.contains(g));
  CHECK(a.size() == 8);
  CHECK(b.size() == 2);
}

TEST_CASE("polynomial features") {
  const auto e1 = monomial_exponents(1, 2);
  CHECK(polynomial_features(std::vector<double>{3.0}, e1) == std::vector<double>{1.0, 3.0, 9.0});
  const auto e2 = monomial_exponents(2, 2);
  CHECK(e2.size() == 6);
  CHECK(polynomial_features(std::vector<double>{2.0, 5.0}, e2) ==
        std::vector<double>{1.0, 2.0, 5.0, 4.0, 10.0, 25.0});
  CHECK(monomial_exponents(2, 3).size() == 10);
}

TEST_CASE("linear fit recovers a planted relation") {
  Dataset d;
  d.feature_names = {"rssi"};
  for (int i = 0; i < 25; ++i) {
    const double rssi = -60.0 + 1.3 * i;
    d.rows.push_back({{rssi}, -1.7 * rssi + 4.0, ""});
  }
  const auto m = fit(ModelSpec::linear(), d);
  const auto& c = std::get<LinearParams>(m.parameters()).coefficients;
  CHECK(c[0] == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(c[1] == doctest::Approx(-1.7).epsilon(1e-9));
  CHECK(evaluate(m, d).mae < 1e-9);
}

TEST_CASE("ridge with zero penalty equals linear; positive penalty shrinks") {
  std::mt19937_64 gen(5);
  const auto d = random_dataset(gen, 40, 2);
  const auto lin = std::get<LinearParams>(fit(ModelSpec::linear(), d).parameters());
  const auto r0 = std::get<LinearParams>(fit(ModelSpec::ridge(0.0), d).parameters());
  for (std::size_t i = 0; i < lin.coefficients.size(); ++i) {
    CHECK(std::abs(lin.coefficients[i] - r0.coefficients[i]) <= 1e-6);
  }
  const auto r = std::get<LinearParams>(fit(ModelSpec::ridge(100.0), d).parameters());
  const auto norm = [](const std::vector<double>& c) { return c[1] * c[1] + c[2] * c[2]; };
  CHECK(norm(r.coefficients) < norm(lin.coefficients));
}

TEST_CASE("rank-deficient systems are reported") {
  // tx_power constant: collinear with the intercept.
  const auto log = synthetic_log(6, {13});
  const auto d = assemble(log, FeatureMode::AllTx);
  CHECK_THROWS_AS(fit(ModelSpec::linear(), d), SingularSystem);
  CHECK_THROWS_AS(fit(ModelSpec::polynomial(2), d), SingularSystem);
  CHECK_NOTHROW(fit(ModelSpec::ridge(1.0), d));
}

TEST_CASE("fit input validation") {
  Dataset empty;
  empty.feature_names = {"x"};
  CHECK_THROWS_AS(fit(ModelSpec::linear(), empty), ValidationError);
  std::mt19937_64 gen(1);
  const auto d = random_dataset(gen, 10, 1);
  CHECK_THROWS_AS(fit(ModelSpec::polynomial(1), d), ValidationError);
  ModelSpec rf = ModelSpec::random_forest();
  rf.forest.n_trees = 0;
  CHECK_THROWS_AS(fit(rf, d), ValidationError);
  CHECK_THROWS_AS(fit(ModelSpec::ridge(-1.0), d), ValidationError);
}

TEST_CASE("single fully grown tree memorizes distinct rows") {
  std::mt19937_64 gen(13);
  const auto d = random_dataset(gen, 20, 2);
  ModelSpec spec = ModelSpec::random_forest();
  spec.forest = {.n_trees = 1, .max_depth = forest::kUnlimitedDepth, .min_leaf = 1,
                 .bootstrap = false};
  const auto m = fit(spec, d);
  for (const auto& r : d.rows) CHECK(m.predict(r.features) == r.target_pct);
}

TEST_CASE("forest prediction is the mean of its trees") {
  std::mt19937_64 gen(17);
  const auto d = random_dataset(gen, 60, 2);
  ModelSpec spec = ModelSpec::random_forest(3);
  spec.forest.n_trees = 15;
  const auto m = fit(spec, d);
  const auto& f = std::get<forest::RandomForest>(m.parameters());
  CHECK(f.trees().size() == 15);
  for (const auto& r : d.rows) {
    const auto per_tree = f.tree_predictions(r.features);
    const double mean = std::accumulate(per_tree.begin(), per_tree.end(), 0.0) / per_tree.size();
    CHECK(m.predict(r.features) == mean);
  }
  for (const auto& t : f.trees()) CHECK(t.depth() <= spec.forest.max_depth);

  const auto again = fit(spec, d);
  for (const auto& r : d.rows) CHECK(m.predict(r.features) == again.predict(r.features));
}

TEST_CASE("tree respects min_leaf and depth") {
  std::mt19937_64 gen(19);
  const auto d = random_dataset(gen, 50, 1);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (const auto& r : d.rows) {
    x.push_back(r.features);
    y.push_back(r.target_pct);
  }
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  const auto stump = forest::RegressionTree::grow(x, y, idx, 1, 1);
  CHECK(stump.nodes().size() == 3);
  const auto coarse = forest::RegressionTree::grow(x, y, idx, 100, 10);
  // Leaves hold >= 10 rows, so at most 5 leaves.
  const auto leaves = std::count_if(coarse.nodes().begin(), coarse.nodes().end(),
                                    [](const auto& n) { return n.feature < 0; });
  CHECK(leaves <= 5);
}

TEST_CASE("predict") {
  const TrainedModel m(ModelSpec::linear(), FeatureMode::MedianTx, {"rssi_dbm"}, 13,
                       LinearParams{{10.0, -2.0}}, {});
  CHECK(m.predict(std::vector<double>{-40.0}) == 90.0);
  CHECK(m.predict(std::vector<double>{-40.0}) == m.predict(std::vector<double>{-40.0}));

  const TrainedModel two(ModelSpec::linear(), FeatureMode::AllTx, {"rssi_dbm", "tx_power_dbm"},
                         std::nullopt, LinearParams{{1.0, 2.0, 3.0}}, {});
  CHECK_THROWS_AS(two.predict(std::vector<double>{1.0}), ValidationError);
}

TEST_CASE("metrics") {
  const std::vector<double> y{10, 20, 30};
  CHECK(r_squared(y, y) == 1.0);
  CHECK(mean_absolute_error(y, y) == 0.0);
  CHECK(r_squared(y, std::vector<double>{20, 20, 20}) == 0.0);

  const std::vector<double> p{12, 18, 33};
  CHECK(mean_absolute_error(y, p) == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
  CHECK(*r_squared(y, p) == doctest::Approx(0.915).epsilon(1e-12));
  CHECK(*r_squared(y, p) == doctest::Approx(oracle::r_squared_brute(y, p)).epsilon(1e-12));

  const std::vector<double> flat{5, 5, 5};
  CHECK_FALSE(r_squared(flat, p).has_value());
  CHECK(mean_absolute_error(flat, p) > 0.0);
  CHECK_THROWS_AS(r_squared(y, std::vector<double>{1.0}), ValidationError);
}

TEST_CASE("train-mean predictor scores zero on the training set") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = random_dataset(gen, 5 + trial, 1);
    std::vector<double> y;
    for (const auto& r : d.rows) y.push_back(r.target_pct);
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    CHECK(*r_squared(y, std::vector<double>(y.size(), mean)) == 0.0);
  }
}

TEST_CASE("MAE is translation equivariant") {
  std::mt19937_64 gen(29);
  std::normal_distribution<double> z(0.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> y, p;
    for (int i = 0; i < 12; ++i) {
      y.push_back(z(gen));
      p.push_back(z(gen));
    }
    const double c = z(gen);
    auto ys = y, ps = p;
    for (auto& v : ys) v += c;
    for (auto& v : ps) v += c;
    CHECK(mean_absolute_error(ys, ps) == doctest::Approx(mean_absolute_error(y, p)).epsilon(1e-9));
  }
}

TEST_CASE("evaluate reports undefined R2 for constant targets") {
  Dataset d;
  d.feature_names = {"x"};
  for (int i = 0; i < 4; ++i) d.rows.push_back({{double(i)}, 7.0, ""});
  const TrainedModel m(ModelSpec::linear(), FeatureMode::MedianTx, {"x"}, 13,
                       LinearParams{{6.0, 0.0}}, {});
  const auto e = evaluate(m, d);
  CHECK_FALSE(e.r_squared.has_value());
  CHECK(e.mae == 1.0);
}

TEST_CASE("compare") {
  const auto log = synthetic_log(12, range(5, 22));
  const std::vector<FeatureMode> modes{FeatureMode::AllTx, FeatureMode::MedianTx};
  CHECK(compare({}, log, modes, {}).empty());

  const auto specs = headline_specs(0);
  const auto rows = compare(specs, log, modes, {.seed = 4});
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].best);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK_FALSE(rows[i].best);
    if (rows[i].evaluation && rows[i].evaluation->r_squared) {
      CHECK(*rows[i - 1].evaluation->r_squared >= *rows[i].evaluation->r_squared);
    }
  }

  // Too few sweeps to split the median-power dataset: row-level errors only.
  const auto tiny = synthetic_log(1, range(5, 22));
  const auto err_rows = compare(specs, tiny, modes, {});
  REQUIRE(err_rows.size() == 6);
  int errors = 0;
  for (const auto& r : err_rows) errors += r.error.empty() ? 0 : 1;
  CHECK(errors == 3);
  CHECK(err_rows.back().error.size() > 0);
}

TEST_CASE("table rendering flags the best row") {
  auto row = [](ModelKind k, FeatureMode m, double r2, double mae) {
    return ComparisonRow{display_name(k, m), {}, m, Evaluation{r2, mae, 10}, {}, false};
  };
  std::vector<ComparisonRow> rows{
      row(ModelKind::Linear, FeatureMode::AllTx, 0.18, 7.66),
      row(ModelKind::Polynomial, FeatureMode::MedianTx, 0.88, 1.45),
      row(ModelKind::RandomForest, FeatureMode::MedianTx, 0.90, 0.94),
      row(ModelKind::Linear, FeatureMode::MedianTx, 0.88, 3.23),
      row(ModelKind::RandomForest, FeatureMode::AllTx, 0.92, 1.63),
      row(ModelKind::Polynomial, FeatureMode::AllTx, 0.80, 4.43),
  };
  rank_rows(rows);
  CHECK(rows[0].model_name == "Random Forest w/ all TX powers");
  CHECK(rows[0].best);
  const std::string text = render_table(rows);
  CHECK(text.find("* Random Forest w/ all TX powers") != std::string::npos);
  CHECK(text.find(" 0.92 | 1.63") != std::string::npos);
  CHECK(text.find("Linear Regression w/ all TX powers") > text.find("Polynomial w/ all TX"));
  const std::string csv = render_csv(rows);
  CHECK(csv.rfind("model,mode,r_squared,mae,best,error\n", 0) == 0);
}

TEST_CASE("model files round-trip") {
  std::mt19937_64 gen(31);
  const auto d = random_dataset(gen, 40, 2);
  ModelSpec rf = ModelSpec::random_forest(9);
  rf.forest.n_trees = 5;
  for (const auto& spec : {ModelSpec::linear(), ModelSpec::ridge(0.5), ModelSpec::polynomial(3), rf}) {
    const auto m = fit(spec, d);
    const auto loaded = model_from_json(model_to_json(m));
    CHECK(model_to_json(loaded) == model_to_json(m));
    for (const auto& r : d.rows) CHECK(loaded.predict(r.features) == m.predict(r.features));
  }
  CHECK_THROWS_AS(model_from_json("{}"), IoError);
  CHECK_THROWS_AS(model_from_json("not json"), IoError);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), IoError);
}
