#include "ptreg/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ptreg/kernels.hpp"
#include "ptreg/rng.hpp"

namespace ptreg {
namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

// Near-degenerate eigenvalue cutoff for the divided-difference table.
constexpr double kSpectralGap = 1e-9;

void require_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

}  // namespace

void Dataset::add(Mat x, Mat y) {
  if (inputs.empty()) {
    p = x.rows;
    q = y.rows;
  }
  if (x.rows != p || x.cols != p)
    throw std::invalid_argument("Dataset: input must be " + std::to_string(p) +
                                "x" + std::to_string(p));
  if (y.rows != q || y.cols != q)
    throw std::invalid_argument("Dataset: target must be " +
                                std::to_string(q) + "x" + std::to_string(q));
  inputs.push_back(std::move(x));
  targets.push_back(std::move(y));
}

EntryMask EntryMask::all(int r, int c) {
  EntryMask m;
  m.rows = r;
  m.cols = c;
  m.on.assign(static_cast<std::size_t>(r) * c, 1);
  return m;
}

int EntryMask::count() const {
  int n = 0;
  for (auto v : on) n += v != 0;
  return n;
}

double square_loss(const Mat& y, const Mat& yhat, const EntryMask* mask) {
  require_same_shape(y, yhat, "square_loss");
  if (!mask)
    return frobenius_mse(y, yhat);
  if (mask->rows != y.rows || mask->cols != y.cols)
    throw std::invalid_argument("square_loss: mask shape mismatch");
  if (mask->count() == 0)
    throw std::invalid_argument("square_loss: mask observes no entries");
  double s = 0.0;
  for (int i = 0; i < y.rows; ++i)
    for (int j = 0; j < y.cols; ++j)
      if (mask->at(i, j)) {
        const double d = y(i, j) - yhat(i, j);
        s += d * d;
      }
  return s;
}

std::vector<Mat> grad_layer(const KrausLayer& layer, const Mat& x,
                            const Mat& g) {
  if (x.rows != layer.p || x.cols != layer.p)
    throw std::invalid_argument("grad_layer: input shape mismatch");
  if (g.rows != layer.q || g.cols != layer.q)
    throw std::invalid_argument("grad_layer: upstream gradient shape mismatch");
  const auto& k = kernels::active();
  const Mat gt = transpose(g);
  std::vector<Mat> grads;
  grads.reserve(layer.kraus.size());
  Mat ga(layer.q, layer.p);
  for (const Mat& a : layer.kraus) {
    Mat grad(layer.q, layer.p);
    // G A_j X^T
    k.gemm_nn(ga.ptr(), g.ptr(), a.ptr(), layer.q, layer.q, layer.p, false);
    k.gemm_nt(grad.ptr(), ga.ptr(), x.ptr(), layer.q, layer.p, layer.p, false);
    // + G^T A_j X
    k.gemm_nn(ga.ptr(), gt.ptr(), a.ptr(), layer.q, layer.q, layer.p, false);
    k.gemm_nn(grad.ptr(), ga.ptr(), x.ptr(), layer.q, layer.p, layer.p, true);
    grads.push_back(std::move(grad));
  }
  return grads;
}

Mat grad_reeig(const Mat& s, double eps, const Mat& g) {
  if (!s.square())
    throw std::invalid_argument("grad_reeig: expected square input");
  require_same_shape(s, g, "grad_reeig");
  const int n = s.rows;
  const EigResult eig = sym_eig(symmetrized(s));
  const Mat gsym = symmetrized(g);

  // P = U^T G_sym U
  const Mat ut = transpose(eig.vectors);
  const Mat p = matmul(matmul(ut, gsym), eig.vectors);

  Mat kp(n, n);
  const auto& lam = eig.eigenvalues;
  auto clamp = [eps](double v) { return v < eps ? eps : v; };
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      const double gap = lam[u] - lam[v];
      double kuv;
      if (std::abs(gap) > kSpectralGap)
        kuv = (clamp(lam[u]) - clamp(lam[v])) / gap;
      else
        kuv = lam[u] < eps ? 0.0 : 1.0;
      kp(u, v) = kuv * p(u, v);
    }
  return symmetrized(matmul(matmul(eig.vectors, kp), ut));
}

namespace {

// dLoss/d(layer input) = sum_j A_j^T G A_j for upstream gradient G.
Mat input_gradient(const KrausLayer& layer, const Mat& g) {
  const auto& k = kernels::active();
  Mat h(layer.p, layer.p);
  Mat atg(layer.p, layer.q);
  for (std::size_t j = 0; j < layer.kraus.size(); ++j) {
    const Mat at = transpose(layer.kraus[j]);
    k.gemm_nn(atg.ptr(), at.ptr(), g.ptr(), layer.p, layer.q, layer.q, false);
    k.gemm_nn(h.ptr(), atg.ptr(), layer.kraus[j].ptr(), layer.p, layer.q,
              layer.p, j > 0);
  }
  return h;
}

Mat residual_gradient(const Mat& y, const Mat& yhat, const EntryMask* mask) {
  Mat g(y.rows, y.cols);
  for (int i = 0; i < y.rows; ++i)
    for (int j = 0; j < y.cols; ++j)
      g(i, j) = (mask && !mask->at(i, j)) ? 0.0
                                          : 2.0 * (yhat(i, j) - y(i, j));
  return g;
}

}  // namespace

double grad_model(const StackedModel& model, const Mat& x, const Mat& y,
                  const EntryMask* mask, ModelGrads& grads) {
  const int depth = model.depth();
  grads.assign(static_cast<std::size_t>(depth), {});

  ForwardCache cache;
  const Mat yhat = forward_cached(model, x, cache);
  const double loss = square_loss(y, yhat, mask);

  Mat g = residual_gradient(y, yhat, mask);
  for (int k = depth - 1; k >= 0; --k) {
    const Mat& layer_in = k == 0 ? x : cache.post[k - 1];
    grads[k] = grad_layer(model.layers[k], layer_in, g);
    if (k > 0) {
      const Mat h = input_gradient(model.layers[k], g);
      g = grad_reeig(cache.pre[k - 1], model.activation_eps, h);
    }
  }
  return loss;
}

std::vector<double> finite_diff_grad(
    const std::function<double(const std::vector<double>&)>& loss_fn,
    std::vector<double> params, double h) {
  if (h <= 0.0) throw std::invalid_argument("finite_diff_grad: h must be > 0");
  std::vector<double> grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = loss_fn(params);
    params[i] = saved - h;
    const double down = loss_fn(params);
    params[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

void sgd_step(std::vector<Mat>& params, const std::vector<Mat>& grads,
              double lr) {
  if (params.size() != grads.size())
    throw std::invalid_argument("sgd_step: parameter/gradient count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_same_shape(params[i], grads[i], "sgd_step");
    kernels::active().sgd_step(params[i].ptr(), grads[i].ptr(), lr,
                               static_cast<int>(params[i].size()));
  }
}

void adam_step(std::vector<Mat>& params, const std::vector<Mat>& grads,
               AdamState& state, double lr) {
  if (params.size() != grads.size())
    throw std::invalid_argument("adam_step: parameter/gradient count mismatch");
  if (state.m.empty()) {
    for (const Mat& p : params) {
      state.m.emplace_back(p.rows, p.cols);
      state.v.emplace_back(p.rows, p.cols);
    }
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, state.step);
  const double bc2 = 1.0 - std::pow(kAdamBeta2, state.step);
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_same_shape(params[i], grads[i], "adam_step");
    kernels::active().adam_step(params[i].ptr(), state.m[i].ptr(),
                                state.v[i].ptr(), grads[i].ptr(), lr,
                                kAdamBeta1, kAdamBeta2, kAdamEps, bc1, bc2,
                                static_cast<int>(params[i].size()));
  }
}

double mean_entry_mse(const Dataset& data,
                      const std::function<Mat(const Mat&)>& predict,
                      const std::vector<EntryMask>* masks) {
  if (data.size() == 0)
    throw std::invalid_argument("mean_entry_mse: empty dataset");
  double loss = 0.0;
  long entries = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const EntryMask* mask = masks ? &(*masks)[i] : nullptr;
    loss += square_loss(data.targets[i], predict(data.inputs[i]), mask);
    entries += mask ? mask->count() : static_cast<long>(data.q) * data.q;
  }
  return loss / static_cast<double>(entries);
}

double mean_entry_mse(const StackedModel& model, const Dataset& data,
                      const std::vector<EntryMask>* masks) {
  return mean_entry_mse(
      data, [&](const Mat& x) { return forward(model, x); }, masks);
}

namespace {

std::vector<Mat*> flat_params(StackedModel& model) {
  std::vector<Mat*> out;
  for (auto& layer : model.layers)
    for (auto& a : layer.kraus) out.push_back(&a);
  return out;
}

}  // namespace

std::pair<StackedModel, TrainLog> fit(const Dataset& data,
                                      const std::vector<LayerSpec>& arch,
                                      const TrainConfig& cfg,
                                      const std::vector<EntryMask>* masks) {
  const auto t0 = std::chrono::steady_clock::now();
  if (data.size() == 0) throw std::invalid_argument("fit: empty dataset");
  if (arch.empty()) throw std::invalid_argument("fit: empty architecture");
  if (arch.back().q != data.q)
    throw std::invalid_argument(
        "fit: architecture ends at " + std::to_string(arch.back().q) +
        " but targets are " + std::to_string(data.q) + "x" +
        std::to_string(data.q));
  if (cfg.learning_rate <= 0.0)
    throw std::invalid_argument("fit: learning rate must be > 0");
  if (cfg.batch_size < 1)
    throw std::invalid_argument("fit: batch size must be >= 1");
  if (masks && masks->size() != data.size())
    throw std::invalid_argument("fit: one mask per sample required");

  Rng rng(cfg.seed);

  // Initialization: layer by layer, operator by operator, entries row-major.
  std::vector<KrausLayer> layers;
  int p_in = data.p;
  for (const LayerSpec& spec : arch) {
    if (spec.q < 1 || spec.r < 1)
      throw std::invalid_argument("fit: layer sides and ranks must be >= 1");
    const double scale = cfg.init_scale >= 0.0
                             ? cfg.init_scale
                             : 1.0 / std::sqrt(static_cast<double>(p_in) *
                                               static_cast<double>(spec.r));
    std::vector<Mat> ops;
    ops.reserve(spec.r);
    for (int j = 0; j < spec.r; ++j) {
      Mat a(spec.q, p_in);
      for (double& v : a.data) v = scale * rng.normal();
      ops.push_back(std::move(a));
    }
    layers.emplace_back(p_in, spec.q, std::move(ops));
    p_in = spec.q;
  }
  StackedModel model(std::move(layers));

  TrainLog log;
  if (cfg.epochs <= 0) {
    log.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    return {std::move(model), std::move(log)};
  }

  const std::size_t l = data.size();
  std::vector<std::size_t> order(l);
  std::iota(order.begin(), order.end(), 0);

  std::vector<Mat*> params = flat_params(model);
  AdamState adam;
  ModelGrads sample_grads;
  std::vector<Mat> batch_grads;
  for (Mat* p : params) batch_grads.emplace_back(p->rows, p->cols);
  std::vector<Mat> param_values(params.size(), Mat(1, 1));
  std::vector<std::size_t> batch;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Seeded Fisher-Yates shuffle.
    for (std::size_t i = l - 1; i > 0; --i)
      std::swap(order[i], order[rng.index(i + 1)]);

    for (std::size_t start = 0; start < l;
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
          std::min(l, start + static_cast<std::size_t>(cfg.batch_size));
      batch.assign(order.begin() + start, order.begin() + stop);
      // Ascending sample index keeps the reduction order canonical.
      std::sort(batch.begin(), batch.end());

      for (Mat& g : batch_grads)
        std::fill(g.data.begin(), g.data.end(), 0.0);
      long batch_entries = 0;
      for (std::size_t idx : batch) {
        const EntryMask* mask = masks ? &(*masks)[idx] : nullptr;
        grad_model(model, data.inputs[idx], data.targets[idx], mask,
                   sample_grads);
        batch_entries +=
            mask ? mask->count() : static_cast<long>(data.q) * data.q;
        std::size_t flat = 0;
        for (auto& layer_grads : sample_grads)
          for (Mat& g : layer_grads)
            kernels::active().axpy(batch_grads[flat++].ptr(), g.ptr(), 1.0,
                                   static_cast<int>(g.size()));
      }
      // Per-entry mean objective over the batch.
      const double inv = 1.0 / static_cast<double>(batch_entries);
      for (Mat& g : batch_grads)
        kernels::active().scale(g.ptr(), inv, static_cast<int>(g.size()));

      for (std::size_t i = 0; i < params.size(); ++i)
        param_values[i] = *params[i];
      if (cfg.optimizer == TrainConfig::Optimizer::adam)
        adam_step(param_values, batch_grads, adam, cfg.learning_rate);
      else
        sgd_step(param_values, batch_grads, cfg.learning_rate);
      for (std::size_t i = 0; i < params.size(); ++i)
        *params[i] = param_values[i];
    }

    log.epoch_loss.push_back(mean_entry_mse(model, data, masks));
  }

  log.final_loss = log.epoch_loss.back();
  log.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return {std::move(model), std::move(log)};
}

std::vector<double> pack_params(const StackedModel& model) {
  std::vector<double> flat;
  for (const auto& layer : model.layers)
    for (const auto& a : layer.kraus)
      flat.insert(flat.end(), a.data.begin(), a.data.end());
  return flat;
}

void unpack_params(StackedModel& model, const std::vector<double>& flat) {
  std::size_t pos = 0;
  for (auto& layer : model.layers)
    for (auto& a : layer.kraus) {
      if (pos + a.size() > flat.size())
        throw std::invalid_argument("unpack_params: too few values");
      std::copy(flat.begin() + pos, flat.begin() + pos + a.size(),
                a.data.begin());
      pos += a.size();
    }
  if (pos != flat.size())
    throw std::invalid_argument("unpack_params: too many values");
}

double grad_check_max_rel(int p, int q, int r, int depth, std::uint64_t seed,
                          double h) {
  if (p < 1 || q < 1 || r < 1 || depth < 1)
    throw std::invalid_argument("grad_check_max_rel: bad configuration");
  Rng rng(seed);

  std::vector<KrausLayer> layers;
  for (int k = 0; k < depth; ++k) {
    const int pin = p;
    const int qout = k == depth - 1 ? q : p;
    const double scale = 1.0 / std::sqrt(static_cast<double>(pin) * r);
    std::vector<Mat> ops;
    for (int j = 0; j < r; ++j) {
      Mat a(qout, pin);
      for (double& v : a.data) v = scale * rng.normal();
      ops.push_back(std::move(a));
    }
    layers.emplace_back(pin, qout, std::move(ops));
  }
  StackedModel model(std::move(layers));

  Mat g(p, p);
  for (double& v : g.data) v = rng.normal();
  Mat x = scaled(matmul_nt(g, g), 1.0 / p);

  if (depth >= 2) {
    // Push every pre-activation spectrum above eps + 0.3 so the clamp is
    // locally smooth across the finite-difference stencil.
    const double target = model.activation_eps + 0.3;
    for (int iter = 0; iter < 60; ++iter) {
      ForwardCache cache;
      forward_cached(model, x, cache);
      double worst = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k + 1 < cache.pre.size(); ++k)
        worst = std::min(worst, min_eigenvalue(cache.pre[k]));
      if (worst >= target) break;
      x = scaled(x, worst > 1e-9 ? std::min(1e6, 1.2 * target / worst) : 2.0);
    }
  }

  Mat y(q, q);
  for (double& v : y.data) v = rng.normal();
  y = symmetrized(y);
  const double out_scale = max_abs(forward(model, x));
  if (out_scale > 1.0) y = scaled(y, out_scale);

  ModelGrads grads;
  grad_model(model, x, y, nullptr, grads);
  std::vector<double> analytic;
  for (const auto& layer_grads : grads)
    for (const Mat& m : layer_grads)
      analytic.insert(analytic.end(), m.data.begin(), m.data.end());

  StackedModel probe = model;
  const auto oracle = finite_diff_grad(
      [&](const std::vector<double>& theta) {
        unpack_params(probe, theta);
        return square_loss(y, forward(probe, x));
      },
      pack_params(model), h);

  double ref = 1e-12;
  for (double v : oracle) ref = std::max(ref, std::abs(v));
  double dev = 0.0;
  for (std::size_t i = 0; i < oracle.size(); ++i)
    dev = std::max(dev, std::abs(analytic[i] - oracle[i]));
  return dev / ref;
}

}  // namespace ptreg
