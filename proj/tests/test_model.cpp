#include <doctest.h>

#include "ptreg/datagen.hpp"
#include "ptreg/model.hpp"

using namespace ptreg;

TEST_CASE("reeig leaves well-conditioned PSD input untouched") {
  const Mat s(2, 2, {3, 0, 0, 1});
  CHECK(max_abs_diff(reeig(s, 1e-4), s) == 0.0);
}

TEST_CASE("reeig clamps negative eigenvalues") {
  const Mat s(2, 2, {2, 0, 0, -1});
  const Mat out = reeig(s, 1e-4);
  CHECK(out(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(out(1, 1) == doctest::Approx(1e-4).epsilon(1e-9));
  CHECK(std::abs(out(0, 1)) < 1e-14);
}

TEST_CASE("reeig lifts the zero matrix to eps times identity") {
  const Mat out = reeig(Mat(3, 3), 0.5);
  CHECK(max_abs_diff(out, scaled(Mat::identity(3), 0.5)) < 1e-12);
}

TEST_CASE("reeig is idempotent and PSD-floored") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Mat s = random_gaussian(5, 5, seed);
    const double eps = 1e-3;
    const Mat once = reeig(s, eps);
    CHECK(min_eigenvalue(once) >= eps - 1e-10);
    CHECK(max_abs_diff(reeig(once, eps), once) <= 1e-10);
  }
}

TEST_CASE("reeig rejects non-square input") {
  CHECK_THROWS_AS(reeig(Mat(2, 3), 1e-4), std::invalid_argument);
}

TEST_CASE("stacked model validates the dimension chain") {
  const KrausLayer a = random_kraus_map(3, 2, 1, 0);
  const KrausLayer b = random_kraus_map(4, 2, 1, 0);
  CHECK_THROWS_AS(StackedModel({a, b}), std::invalid_argument);
  CHECK_THROWS_AS(StackedModel({}), std::invalid_argument);
  CHECK_THROWS_AS(StackedModel({a}, 0.0), std::invalid_argument);
}

TEST_CASE("depth-1 forward is exactly apply") {
  const KrausLayer layer = random_kraus_map(4, 3, 2, 9);
  const StackedModel model({layer});
  const Mat x = random_psd(4, 10);
  CHECK(max_abs_diff(forward(model, x), apply(layer, x)) == 0.0);
}

TEST_CASE("depth-1 identity model is the identity") {
  const StackedModel model({KrausLayer(3, 3, {Mat::identity(3)})});
  const Mat x = random_gaussian(3, 3, 4);
  CHECK(max_abs_diff(forward(model, x), x) == 0.0);
}

TEST_CASE("stacked identity layers pass well-conditioned PSD through") {
  const KrausLayer id(3, 3, {Mat::identity(3)});
  const StackedModel model({id, id}, 1e-4);
  // min eigenvalue of x is comfortably above eps
  const Mat x = add(random_psd(3, 21), scaled(Mat::identity(3), 1.0));
  CHECK(max_abs_diff(forward(model, x), x) == 0.0);
}

TEST_CASE("depth-2 forward keeps PSD inputs PSD") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const StackedModel model(
        {random_kraus_map(4, 3, 2, seed), random_kraus_map(3, 3, 2, seed + 50)});
    const Mat x = random_psd(4, seed + 100);
    CHECK(min_eigenvalue(forward(model, x)) >= -1e-10);
  }
}

TEST_CASE("forward rejects inputs of the wrong side") {
  const StackedModel model({random_kraus_map(4, 3, 2, 0)});
  CHECK_THROWS_AS(forward(model, Mat(3, 3)), std::invalid_argument);
}
