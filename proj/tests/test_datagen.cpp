#include <doctest.h>

#include <cmath>

#include "ptreg/datagen.hpp"

using namespace ptreg;

TEST_CASE("random_kraus_map is deterministic per seed") {
  const KrausLayer a = random_kraus_map(4, 3, 2, 42);
  const KrausLayer b = random_kraus_map(4, 3, 2, 42);
  for (int j = 0; j < 2; ++j)
    CHECK(a.kraus[j].data == b.kraus[j].data);
  const KrausLayer c = random_kraus_map(4, 3, 2, 43);
  CHECK(a.kraus[0].data != c.kraus[0].data);
}

TEST_CASE("generic draws have full Kraus rank") {
  for (int r : {1, 2, 4}) {
    const KrausLayer layer = random_kraus_map(3, 2, r, 7 + r);
    CHECK(kraus_rank(layer) == r);
  }
}

TEST_CASE("zero scale gives the zero map") {
  const KrausLayer layer = random_kraus_map(3, 2, 2, 1, 0.0);
  for (const Mat& op : layer.kraus) CHECK(max_abs(op) == 0.0);
  CHECK(max_abs(apply(layer, random_psd(3, 2))) == 0.0);
}

TEST_CASE("random_psd is PSD, deterministic, and unit-scaled") {
  const Mat a = random_psd(12, 5);
  CHECK(is_psd(a, 1e-12));
  CHECK(random_psd(12, 5).data == a.data);

  double mean_diag = 0.0;
  for (int i = 0; i < a.rows; ++i) mean_diag += a(i, i);
  mean_diag /= a.rows;
  CHECK(mean_diag > 0.5);
  CHECK(mean_diag < 1.5);
}

TEST_CASE("synth_dataset: noiseless targets are exact") {
  SyntheticTask task;
  task.true_map = StackedModel({random_kraus_map(4, 2, 2, 8)});
  task.seed = 9;
  const Dataset data = synth_dataset(task, 12);
  CHECK(data.size() == 12);
  for (std::size_t i = 0; i < data.size(); ++i)
    CHECK(square_loss(data.targets[i],
                      forward(task.true_map, data.inputs[i])) == 0.0);
}

TEST_CASE("synth_dataset noise follows the symmetric Gaussian law") {
  SyntheticTask task;
  task.true_map = StackedModel({random_kraus_map(4, 3, 2, 10)});
  task.seed = 11;
  task.noise_sigma = 0.1;
  const int n = 1000;
  const Dataset noisy = synth_dataset(task, n);

  double resid = 0.0;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    const Mat clean = forward(task.true_map, noisy.inputs[i]);
    resid += square_loss(noisy.targets[i], clean);
    // symmetric noise keeps symmetric targets symmetric
    CHECK(max_abs_diff(noisy.targets[i], transpose(noisy.targets[i])) == 0.0);
  }
  const double per_entry = resid / (n * 9.0);
  // E[entry^2]: sigma^2 on the diagonal, sigma^2/2 off it -> sigma^2*(1+1/q)/2
  const double expected = 0.01 * (1.0 + 1.0 / 3.0) / 2.0;
  CHECK(per_entry > 0.5 * expected);
  CHECK(per_entry < 2.0 * expected);
}

TEST_CASE("synth_dataset supports the general two-parameter form") {
  SyntheticTask task;
  task.true_map = StackedModel({random_kraus_map(3, 2, 2, 12)});
  task.general_b = random_kraus_map(3, 2, 2, 13);
  task.seed = 14;
  const Dataset data = synth_dataset(task, 5);
  // targets differ from the CP-form labels but have the right shape
  bool differs = false;
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(data.targets[i].rows == 2);
    if (square_loss(data.targets[i], forward(task.true_map, data.inputs[i])) >
        1e-12)
      differs = true;
  }
  CHECK(differs);
}

TEST_CASE("gaussian input law draws unsymmetric inputs") {
  SyntheticTask task;
  task.true_map = StackedModel({random_kraus_map(3, 2, 1, 15)});
  task.seed = 16;
  const Dataset data = synth_dataset(task, 3, InputLaw::gaussian);
  bool asymmetric = false;
  for (const Mat& x : data.inputs)
    if (max_abs_diff(x, transpose(x)) > 1e-6) asymmetric = true;
  CHECK(asymmetric);
}

TEST_CASE("planted_choi_target is PSD with the planted rank") {
  const Mat target = planted_choi_target(7, 4, 3, 17);
  CHECK(target.rows == 28);
  CHECK(is_psd(target, 1e-10));
  const EigResult eig = sym_eig(target);
  int rank = 0;
  for (double lam : eig.eigenvalues)
    if (lam > 1e-9 * eig.eigenvalues.front()) ++rank;
  CHECK(rank == 3);
}

TEST_CASE("block_missing_mask hides the requested blocks symmetrically") {
  const BlockLayout layout{7, 4};
  const ObservationMask mask = block_missing_mask(layout, 2, 1, 18);
  mask.validate();
  // 2 off-diagonal pairs (2 * 16 entries each) + 1 diagonal block (16)
  CHECK(mask.count() == 28 * 28 - (2 * 2 * 16 + 16));
  CHECK(block_missing_mask(layout, 2, 1, 18).observed == mask.observed);
}

TEST_CASE("random_entry_mask hides the requested fraction") {
  const ObservationMask mask = random_entry_mask(28, 0.85, 19);
  mask.validate();
  const int upper = 28 * 29 / 2;
  int hidden_upper = 0;
  for (int i = 0; i < 28; ++i)
    for (int j = i; j < 28; ++j)
      if (!mask.at(i, j)) ++hidden_upper;
  CHECK(hidden_upper == static_cast<int>(0.85 * upper));
}
