#include <doctest.h>

#include <cmath>

#include "ptreg/baselines.hpp"
#include "ptreg/datagen.hpp"
#include "ptreg/rng.hpp"

using namespace ptreg;

namespace {

// Dataset from an arbitrary (not necessarily CP) linear map on vec(X).
Dataset linear_map_dataset(const Mat& b, int p, int q, int n,
                           std::uint64_t seed) {
  Dataset data;
  data.p = p;
  data.q = q;
  for (int i = 0; i < n; ++i) {
    const Mat x = random_gaussian(p, p, mix_seed(seed, i));
    Mat y(q, q);
    for (int row = 0; row < q * q; ++row) {
      double acc = 0.0;
      for (int col = 0; col < p * p; ++col) acc += b(row, col) * x.data[col];
      y.data[row] = acc;
    }
    data.add(x, y);
  }
  return data;
}

}  // namespace

TEST_CASE("trace regression recovers a planted scalar-output model") {
  SyntheticTask task;
  task.true_map = StackedModel({random_kraus_map(4, 1, 2, 81)});
  task.seed = 82;
  const Dataset train = synth_dataset(task, 150);
  const Dataset test = synth_dataset({task.true_map, {}, 0.0, 83}, 50);

  TrainConfig cfg;
  cfg.learning_rate = 0.02;
  cfg.epochs = 300;
  cfg.seed = 84;
  const TraceRegressionModel model = fit_trace_regression(train, 2, cfg);
  const double mse = mean_entry_mse(
      test, [&](const Mat& x) { return model.predict(x); });
  CHECK(mse <= 1e-3);
}

TEST_CASE("trace regression drives constant-zero targets to zero") {
  Dataset data;
  data.p = 3;
  data.q = 2;
  for (int i = 0; i < 40; ++i) data.add(random_psd(3, 100 + i), Mat(2, 2));

  TrainConfig cfg;
  cfg.learning_rate = 0.02;
  cfg.epochs = 200;
  cfg.seed = 85;
  const TraceRegressionModel model = fit_trace_regression(data, 1, cfg);
  CHECK(mean_entry_mse(data, [&](const Mat& x) { return model.predict(x); }) <=
        1e-6);
}

TEST_CASE("trace regression on q = 1 equals a single ptr fit") {
  SyntheticTask task;
  task.true_map = StackedModel({random_kraus_map(3, 1, 1, 86)});
  task.seed = 87;
  const Dataset data = synth_dataset(task, 30);

  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 88;
  const TraceRegressionModel lifted = fit_trace_regression(data, 1, cfg);

  TrainConfig entry_cfg = cfg;
  entry_cfg.seed = mix_seed(cfg.seed, 0);
  auto [direct, log] = fit(data, {{1, 1}}, entry_cfg);
  CHECK(pack_params(lifted.entry_models[0]) == pack_params(direct));
}

TEST_CASE("multivariate ls reproduces a planted linear map exactly") {
  const int p = 3, q = 2;
  Mat b(q * q, p * p);
  Rng rng(91);
  for (double& v : b.data) v = rng.normal();

  const Dataset train = linear_map_dataset(b, p, q, 2 * p * p, 92);
  const Dataset test = linear_map_dataset(b, p, q, 20, 93);
  const LinearMapCoeffs fitted = fit_multivariate_ls(train);

  CHECK(mean_entry_mse(test, [&](const Mat& x) { return fitted.predict(x); }) <=
        1e-8);
  CHECK(max_abs_diff(fitted.coeffs, b) < 1e-6);
}

TEST_CASE("multivariate ls interpolates a single sample") {
  Dataset data;
  data.p = 3;
  data.q = 2;
  data.add(random_psd(3, 94), symmetrized(random_gaussian(2, 2, 95)));
  const LinearMapCoeffs fitted = fit_multivariate_ls(data);
  CHECK(square_loss(data.targets[0], fitted.predict(data.inputs[0])) <=
        1e-16);
}

TEST_CASE("reduced rank with full k equals plain least squares") {
  SyntheticTask task;
  task.true_map = StackedModel({random_kraus_map(3, 2, 2, 96)});
  task.seed = 97;
  const Dataset data = synth_dataset(task, 25);
  const LinearMapCoeffs ols = fit_multivariate_ls(data);
  const LinearMapCoeffs rr = fit_reduced_rank(data, 4);  // min(9, 4)
  CHECK(max_abs_diff(ols.coeffs, rr.coeffs) <= 1e-10);
}

TEST_CASE("reduced rank recovers a planted rank-2 coefficient matrix") {
  const int p = 3, q = 2;
  Rng rng(98);
  Mat u(q * q, 2), v(2, p * p);
  for (double& x : u.data) x = rng.normal();
  for (double& x : v.data) x = rng.normal();
  const Mat b = matmul(u, v);

  const Dataset train = linear_map_dataset(b, p, q, 3 * p * p, 99);
  const Dataset test = linear_map_dataset(b, p, q, 20, 100);
  const LinearMapCoeffs fitted = fit_reduced_rank(train, 2);
  CHECK(mean_entry_mse(test, [&](const Mat& x) { return fitted.predict(x); }) <=
        1e-6);
}

TEST_CASE("rank-1 truncation cannot beat full least squares on training data") {
  SyntheticTask task;
  task.true_map = StackedModel({random_kraus_map(3, 2, 3, 101)});
  task.noise_sigma = 0.05;
  task.seed = 102;
  const Dataset data = synth_dataset(task, 40);

  const LinearMapCoeffs ols = fit_multivariate_ls(data);
  const LinearMapCoeffs rr1 = fit_reduced_rank(data, 1);
  const double mse_ols =
      mean_entry_mse(data, [&](const Mat& x) { return ols.predict(x); });
  const double mse_rr1 =
      mean_entry_mse(data, [&](const Mat& x) { return rr1.predict(x); });
  CHECK(mse_rr1 >= mse_ols - 1e-12);
}

TEST_CASE("fit_reduced_rank validates k") {
  Dataset data;
  data.p = 2;
  data.q = 2;
  data.add(random_psd(2, 1), Mat(2, 2));
  CHECK_THROWS_AS(fit_reduced_rank(data, 0), std::invalid_argument);
  CHECK_THROWS_AS(fit_reduced_rank(data, 5), std::invalid_argument);
}
