#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "ptreg/model.hpp"

namespace ptreg {

struct TrainConfig {
  enum class Optimizer { sgd, adam };
  Optimizer optimizer = Optimizer::adam;
  double learning_rate = 0.001;
  int epochs = 100;
  int batch_size = 16;
  std::uint64_t seed = 0;
  // Gaussian init std per layer; negative selects auto = 1/sqrt(p_k * r_k).
  double init_scale = -1.0;
};

struct Dataset {
  int p = 0;
  int q = 0;
  std::vector<Mat> inputs;   // each p x p
  std::vector<Mat> targets;  // each q x q

  std::size_t size() const { return inputs.size(); }
  void add(Mat x, Mat y);
};

/// Boolean entry selector for masked losses; true marks an observed entry.
struct EntryMask {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> on;

  static EntryMask all(int r, int c);
  bool at(int i, int j) const {
    return on[static_cast<std::size_t>(i) * cols + j] != 0;
  }
  void set(int i, int j, bool v) {
    on[static_cast<std::size_t>(i) * cols + j] = v ? 1 : 0;
  }
  int count() const;
};

struct TrainLog {
  std::vector<double> epoch_loss;  // per-entry mean MSE after each epoch
  double final_loss = 0.0;
  double seconds = 0.0;
};

/// One layer of a fit architecture: output side and operator count.
struct LayerSpec {
  int q = 0;
  int r = 0;
};

/// Squared Frobenius residual; with a mask, summed over observed entries
/// only. An empty mask (no observed entry) is an error.
double square_loss(const Mat& y, const Mat& yhat,
                   const EntryMask* mask = nullptr);

/// Gradient of a scalar loss w.r.t. each Kraus operator given the upstream
/// gradient G w.r.t. the layer output: dL/dA_j = G A_j X^T + G^T A_j X.
std::vector<Mat> grad_layer(const KrausLayer& layer, const Mat& x,
                            const Mat& g);

/// Backward rule for reeig via the spectral chain rule (Daleckii-Krein):
/// divided differences of the clamp on the eigenbasis of sym(S).
Mat grad_reeig(const Mat& s, double eps, const Mat& g);

/// Gradients for every operator of every layer, aligned [layer][operator].
using ModelGrads = std::vector<std::vector<Mat>>;

/// Full-model backward pass; returns the (masked) square loss at this point
/// and accumulates gradients into `grads` (resized and zeroed internally).
double grad_model(const StackedModel& model, const Mat& x, const Mat& y,
                  const EntryMask* mask, ModelGrads& grads);

/// Central finite differences of an arbitrary scalar function, coordinate by
/// coordinate. The independent oracle for every analytic gradient here.
std::vector<double> finite_diff_grad(
    const std::function<double(const std::vector<double>&)>& loss_fn,
    std::vector<double> params, double h = 1e-5);

struct AdamState {
  std::vector<Mat> m;
  std::vector<Mat> v;
  long step = 0;
};

void sgd_step(std::vector<Mat>& params, const std::vector<Mat>& grads,
              double lr);
/// Standard Adam: beta1 = 0.9, beta2 = 0.999, eps = 1e-8, bias-corrected.
void adam_step(std::vector<Mat>& params, const std::vector<Mat>& grads,
               AdamState& state, double lr);

/// Per-entry mean squared error of a predictor over a dataset, the shared
/// evaluation metric for models and baselines alike.
double mean_entry_mse(const Dataset& data,
                      const std::function<Mat(const Mat&)>& predict,
                      const std::vector<EntryMask>* masks = nullptr);
double mean_entry_mse(const StackedModel& model, const Dataset& data,
                      const std::vector<EntryMask>* masks = nullptr);

/// Mini-batch gradient descent on the (masked) square loss. Kraus operators
/// initialize IID Gaussian; batches come from a seeded Fisher-Yates shuffle
/// and accumulate gradients in ascending sample index, so a (seed, data,
/// config) triple gives a bit-identical model within one build. epochs = 0
/// returns the initialization with an empty log.
std::pair<StackedModel, TrainLog> fit(
    const Dataset& data, const std::vector<LayerSpec>& arch,
    const TrainConfig& cfg, const std::vector<EntryMask>* masks = nullptr);

/// All Kraus operators flattened, layer by layer, row-major.
std::vector<double> pack_params(const StackedModel& model);
void unpack_params(StackedModel& model, const std::vector<double>& flat);

/// Compares grad_model against the finite-difference oracle on one seeded
/// random configuration (inner layers square at side p, final side q, all
/// rank r) and returns the max deviation relative to the largest oracle
/// coordinate. For depth >= 2 the input is scaled until every
/// pre-activation spectrum clears activation_eps + 0.3, keeping the clamp
/// away from its kink.
double grad_check_max_rel(int p, int q, int r, int depth, std::uint64_t seed,
                          double h = 1e-5);

}  // namespace ptreg
