#include <doctest.h>

#include <cmath>

#include "ptreg/cpmap.hpp"
#include "ptreg/datagen.hpp"
#include "ptreg/rng.hpp"

using namespace ptreg;

namespace {

// Choi matrix of the transpose map on M_2: the swap matrix, which has a -1
// eigenvalue. The canonical positive-but-not-completely-positive witness.
Mat transpose_map_choi() {
  Mat c(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int s = 0; s < 2; ++s)
      for (int j = 0; j < 2; ++j)
        for (int t = 0; t < 2; ++t)
          c(i * 2 + s, j * 2 + t) = (s == j && t == i) ? 1.0 : 0.0;
  return c;
}

}  // namespace

TEST_CASE("KrausLayer validates shapes") {
  CHECK_THROWS_AS(KrausLayer(2, 2, {}), std::invalid_argument);
  CHECK_THROWS_AS(KrausLayer(2, 3, {Mat(2, 2)}), std::invalid_argument);
  const KrausLayer ok(2, 3, {Mat(3, 2)});
  CHECK(ok.r() == 1);
  // Over-parametrized representations (r > p*q) are allowed.
  std::vector<Mat> many(7, Mat(1, 2));
  CHECK(KrausLayer(2, 1, std::move(many)).r() == 7);
}

TEST_CASE("apply: identity map") {
  const KrausLayer id(3, 3, {Mat::identity(3)});
  const Mat x = random_gaussian(3, 3, 5);
  CHECK(max_abs_diff(apply(id, x), x) == 0.0);
}

TEST_CASE("apply: scalar map") {
  const KrausLayer layer(1, 1, {Mat(1, 1, {1}), Mat(1, 1, {2})});
  const Mat x(1, 1, {3});
  CHECK(apply(layer, x)(0, 0) == 15.0);
}

TEST_CASE("apply maps PSD inputs to PSD outputs") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const KrausLayer layer = random_kraus_map(4, 3, 2, seed);
    const Mat x = random_psd(4, seed + 100);
    CHECK(min_eigenvalue(apply(layer, x)) >= -1e-10);
  }
}

TEST_CASE("apply rejects wrong input side") {
  const KrausLayer layer = random_kraus_map(4, 3, 2, 0);
  CHECK_THROWS_AS(apply(layer, Mat(3, 3)), std::invalid_argument);
}

TEST_CASE("choi of the identity map on M_2") {
  const KrausLayer id(2, 2, {Mat::identity(2)});
  const ChoiMatrix c = choi(id);
  CHECK(c.mat.rows == 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const bool on = (a == 0 || a == 3) && (b == 0 || b == 3);
      CHECK(c.mat(a, b) == (on ? 1.0 : 0.0));
    }
  CHECK(kraus_rank(id) == 1);
  CHECK(is_psd(c.mat, 1e-10));
}

TEST_CASE("choi of the zero map is zero") {
  const KrausLayer zero(2, 3, {Mat(3, 2)});
  CHECK(max_abs(choi(zero).mat) == 0.0);
}

TEST_CASE("choi blocks equal the map on matrix units") {
  const KrausLayer layer = random_kraus_map(3, 2, 4, 17);
  const ChoiMatrix c = choi(layer);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Mat block = apply(layer, matrix_unit(3, i, j));
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
          CHECK(c.mat(i * 2 + s, j * 2 + t) == block(s, t));
    }
}

TEST_CASE("choi rank equals the number of independent operators") {
  for (int r : {1, 2, 3, 5}) {
    const KrausLayer layer = random_kraus_map(3, 2, r, 23 + r);
    const EigResult eig = sym_eig(choi(layer).mat);
    int rank = 0;
    for (double lam : eig.eigenvalues)
      if (lam > 1e-9 * eig.eigenvalues.front()) ++rank;
    CHECK(rank == r);
  }
}

TEST_CASE("kraus_from_choi round trips the identity map") {
  const KrausLayer id(2, 2, {Mat::identity(2)});
  const KrausLayer back = kraus_from_choi(choi(id));
  CHECK(back.r() == 1);
  // A_1 recovered up to sign
  const double diag = back.kraus[0](0, 0);
  CHECK(std::abs(std::abs(diag) - 1.0) < 1e-12);
  CHECK(max_abs_diff(back.kraus[0], scaled(Mat::identity(2), diag)) < 1e-12);
}

TEST_CASE("kraus_from_choi of the zero matrix yields one zero operator") {
  const KrausLayer layer = kraus_from_choi(ChoiMatrix{2, 3, Mat(6, 6)});
  CHECK(layer.r() == 1);
  CHECK(max_abs(layer.kraus[0]) == 0.0);
  CHECK(layer.kraus[0].rows == 3);
  CHECK(layer.kraus[0].cols == 2);
}

TEST_CASE("kraus_from_choi rejects indefinite matrices") {
  Mat bad = Mat::identity(4);
  bad(3, 3) = -0.1;
  try {
    kraus_from_choi(ChoiMatrix{2, 2, bad}, 1e-8);
    FAIL("expected NotCompletelyPositiveError");
  } catch (const NotCompletelyPositiveError& e) {
    CHECK(e.min_eigenvalue == doctest::Approx(-0.1).epsilon(1e-9));
  }
}

TEST_CASE("kraus_from_choi round trip reproduces the map") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const KrausLayer layer = random_kraus_map(3, 2, 2, 1000 + trial);
    const ChoiMatrix c = choi(layer);
    const KrausLayer back = kraus_from_choi(c);
    // Representations are non-unique; compare maps through apply.
    const Mat x = random_psd(3, 2000 + trial);
    CHECK(max_abs_diff(apply(layer, x), apply(back, x)) < 1e-8);
    CHECK(max_abs_diff(choi(back).mat, c.mat) < 1e-8);
  }
}

TEST_CASE("stinespring: single operator") {
  const KrausLayer layer(2, 2, {Mat::identity(2)});
  const StinespringForm sf = to_stinespring(layer);
  CHECK(sf.m == 1);
  CHECK(max_abs_diff(sf.a, Mat::identity(2)) == 0.0);
  const Mat x = Mat::identity(2);
  CHECK(max_abs_diff(apply_stinespring(sf, x), x) == 0.0);
  CHECK(max_abs(apply_stinespring(sf, Mat(2, 2))) == 0.0);
}

TEST_CASE("stinespring: scalar two-operator example") {
  const KrausLayer layer(1, 1, {Mat(1, 1, {1}), Mat(1, 1, {2})});
  const StinespringForm sf = to_stinespring(layer);
  CHECK(sf.m == 2);
  CHECK(sf.a.rows == 2);
  CHECK(sf.a(0, 0) == 1.0);
  CHECK(sf.a(1, 0) == 2.0);
  CHECK(apply_stinespring(sf, Mat(1, 1, {3}))(0, 0) == 15.0);
}

TEST_CASE("stinespring equivalence on random maps") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const KrausLayer layer = random_kraus_map(4, 3, 3, seed);
    const StinespringForm sf = to_stinespring(layer);
    for (int probe = 0; probe < 20; ++probe) {
      const Mat x = random_gaussian(4, 4, 777 + seed * 100 + probe);
      CHECK(max_abs_diff(apply_stinespring(sf, x), apply(layer, x)) <= 1e-12);
    }
  }
}

TEST_CASE("kraus_rank") {
  const KrausLayer id(2, 2, {Mat::identity(2)});
  CHECK(kraus_rank(id) == 1);

  // Linearly dependent operators collapse to rank 1.
  const Mat a = random_gaussian(2, 3, 12);
  const KrausLayer dependent(3, 2, {a, scaled(a, 2.0)});
  CHECK(dependent.r() == 2);
  CHECK(kraus_rank(dependent) == 1);

  for (int r : {1, 3, 5}) {
    const KrausLayer layer = random_kraus_map(4, 3, r, 55 + r);
    CHECK(kraus_rank(layer) == r);
    CHECK(kraus_rank(layer) <= 4 * 3);
  }
}

TEST_CASE("choi PSD characterizes complete positivity") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int p = 2 + static_cast<int>(seed % 3);
    const int q = 2 + static_cast<int>(seed % 2);
    const int r = 1 + static_cast<int>(seed % 4);
    const KrausLayer layer = random_kraus_map(p, q, r, seed);
    CHECK(is_psd(choi(layer).mat, 1e-10));
  }
  // The transpose map is positive but not completely positive.
  CHECK_FALSE(is_psd(transpose_map_choi(), 1e-10));
  CHECK(min_eigenvalue(transpose_map_choi()) == doctest::Approx(-1.0));
}
