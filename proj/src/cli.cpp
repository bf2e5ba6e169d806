#include "ptreg/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptreg/baselines.hpp"
#include "ptreg/bounds.hpp"
#include "ptreg/complete.hpp"
#include "ptreg/datagen.hpp"
#include "ptreg/io.hpp"
#include "ptreg/rng.hpp"

namespace ptreg {
namespace {

std::uint64_t default_seed() {
  // PTR_SEED is the fallback when no --seed flag is given.
  const char* env = std::getenv("PTR_SEED");
  if (!env) return 0;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw std::invalid_argument("PTR_SEED is not an unsigned integer");
  }
}

std::vector<LayerSpec> parse_arch(const std::string& text) {
  std::vector<LayerSpec> arch;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("bad --arch item '" + item +
                                  "', expected q:r");
    LayerSpec spec;
    spec.q = std::stoi(item.substr(0, colon));
    spec.r = std::stoi(item.substr(colon + 1));
    if (spec.q < 1 || spec.r < 1)
      throw std::invalid_argument("bad --arch item '" + item + "'");
    arch.push_back(spec);
  }
  if (arch.empty()) throw std::invalid_argument("--arch is empty");
  return arch;
}

TrainConfig make_config(double lr, int epochs, int batch, std::uint64_t seed,
                        const std::string& optimizer, double init_scale) {
  TrainConfig cfg;
  cfg.learning_rate = lr;
  cfg.epochs = epochs;
  cfg.batch_size = batch;
  cfg.seed = seed;
  cfg.init_scale = init_scale;
  if (optimizer == "adam")
    cfg.optimizer = TrainConfig::Optimizer::adam;
  else if (optimizer == "sgd")
    cfg.optimizer = TrainConfig::Optimizer::sgd;
  else
    throw std::invalid_argument("unknown optimizer '" + optimizer + "'");
  return cfg;
}

// Depth-d completion architecture: square inner layers at side p, final
// layer to the block side q, all at the same rank.
std::vector<LayerSpec> completion_arch(const BlockLayout& layout, int rank,
                                       int depth) {
  std::vector<LayerSpec> arch;
  for (int k = 0; k + 1 < depth; ++k) arch.push_back({layout.p, rank});
  arch.push_back({layout.q, rank});
  return arch;
}

Mat zero_filled(const Mat& m, const ObservationMask& mask) {
  Mat out = m;
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j)
      if (!mask.at(i, j)) out(i, j) = 0.0;
  return out;
}

// Holds out a seeded 20% of the observed symmetric entry pairs; used to
// score (p, q, rank) candidates in the completion grid search.
ObservationMask holdout_mask(const ObservationMask& full, std::uint64_t seed) {
  std::vector<std::pair<int, int>> observed;
  for (int i = 0; i < full.n; ++i)
    for (int j = i; j < full.n; ++j)
      if (full.at(i, j)) observed.emplace_back(i, j);
  Rng rng(seed);
  for (std::size_t i = observed.size() - 1; i > 0; --i)
    std::swap(observed[i], observed[rng.index(i + 1)]);
  const std::size_t hide =
      std::min(observed.size() - 1, observed.size() / 5);
  ObservationMask reduced = full;
  for (std::size_t k = 0; k < hide; ++k)
    reduced.set(observed[k].first, observed[k].second, false);
  return reduced;
}

double holdout_score(const Mat& filled, const ObservationMask& full,
                     const ObservationMask& reduced, const Mat& completed) {
  double s = 0.0;
  long count = 0;
  for (int i = 0; i < full.n; ++i)
    for (int j = 0; j < full.n; ++j)
      if (full.at(i, j) && !reduced.at(i, j)) {
        const double d = filled(i, j) - completed(i, j);
        s += d * d;
        ++count;
      }
  return s / static_cast<double>(count);
}

int cmd_simulate(int p, int q, int rank, int n, double sigma,
                 std::uint64_t seed, double scale, const std::string& law,
                 bool general, const std::string& out_path) {
  SyntheticTask task;
  task.true_map = StackedModel({random_kraus_map(p, q, rank, seed, scale)});
  task.seed = mix_seed(seed, 1);
  task.noise_sigma = sigma;
  if (general)
    task.general_b = random_kraus_map(p, q, rank, mix_seed(seed, 2), scale);
  InputLaw input_law;
  if (law == "psd")
    input_law = InputLaw::psd;
  else if (law == "gaussian")
    input_law = InputLaw::gaussian;
  else
    throw std::invalid_argument("unknown --input-law '" + law + "'");
  save_dataset(synth_dataset(task, n, input_law), out_path);
  return 0;
}

int cmd_fit(const std::string& data_path, const std::string& arch_text,
            const TrainConfig& cfg, const std::string& out_path,
            const std::string& log_path, std::ostream& out) {
  const Dataset data = load_dataset(data_path);
  auto [model, log] = fit(data, parse_arch(arch_text), cfg);
  save_model(model, out_path);
  if (!log_path.empty()) {
    std::string csv = "epoch,train_loss\n";
    for (std::size_t e = 0; e < log.epoch_loss.size(); ++e)
      csv += std::to_string(e + 1) + "," + format_double(log.epoch_loss[e]) +
             "\n";
    write_file(log_path, csv);
  }
  out << "final_loss " << format_double(log.final_loss) << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path) {
  const StackedModel model = load_model(model_path);
  const Dataset data = load_dataset(data_path);
  Dataset pred;
  pred.p = data.p;
  pred.q = model.output_dim();
  for (const Mat& x : data.inputs) pred.add(x, forward(model, x));
  save_dataset(pred, out_path);
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             std::ostream& out) {
  const StackedModel model = load_model(model_path);
  const Dataset data = load_dataset(data_path);
  out << "mse " << format_double(mean_entry_mse(model, data)) << "\n";
  return 0;
}

int cmd_complete(const std::string& matrix_path, int p, int q, int rank,
                 int depth, const TrainConfig& cfg, bool grid,
                 const std::string& rank_grid_text,
                 const std::string& out_path, std::ostream& out) {
  const Mat raw = load_matrix(matrix_path);
  const ObservationMask full = mask_from_nans(raw);
  const Mat filled = zero_filled(raw, full);

  BlockLayout layout{p, q};
  int best_rank = rank;
  if (grid) {
    std::vector<int> ranks;
    {
      std::istringstream in(rank_grid_text);
      std::string tok;
      while (std::getline(in, tok, ',')) ranks.push_back(std::stoi(tok));
    }
    std::vector<BlockLayout> layouts;
    for (int cand = 1; cand <= raw.rows; ++cand)
      if (raw.rows % cand == 0) layouts.push_back({cand, raw.rows / cand});
    const ObservationMask reduced = holdout_mask(full, mix_seed(cfg.seed, 7));
    const Mat masked = zero_filled(filled, reduced);

    out << "p,q,rank,holdout_mse\n";
    double best = std::numeric_limits<double>::infinity();
    BlockLayout best_layout = layouts.front();
    for (const BlockLayout& cand : layouts)
      for (int r : ranks) {
        CompletionResult res = complete_matrix(
            masked, reduced, cand, completion_arch(cand, r, depth), cfg);
        const double score = holdout_score(filled, full, reduced,
                                           res.completed);
        out << cand.p << "," << cand.q << "," << r << ","
            << format_double(score) << "\n";
        if (score < best) {
          best = score;
          best_layout = cand;
          best_rank = r;
        }
      }
    layout = best_layout;
    out << "selected p=" << layout.p << " q=" << layout.q
        << " rank=" << best_rank << "\n";
  }

  if (layout.side() != raw.rows)
    throw std::invalid_argument("--p * --q must equal the matrix side " +
                                std::to_string(raw.rows));
  CompletionResult res =
      complete_matrix(filled, full, layout,
                      completion_arch(layout, best_rank, depth), cfg);
  save_matrix(res.completed, out_path);
  out << "train_loss " << format_double(res.log.final_loss) << "\n";
  return 0;
}

int cmd_convert(const std::string& model_path, const std::string& to,
                const std::string& out_path) {
  const StackedModel model = load_model(model_path);
  if (model.depth() != 1)
    throw std::invalid_argument(
        "convert: representations exist for depth-1 models only");
  const KrausLayer& layer = model.layers.front();
  if (to == "choi") {
    save_matrix(choi(layer).mat, out_path);
  } else if (to == "stinespring") {
    const StinespringForm sf = to_stinespring(layer);
    nlohmann::ordered_json doc;
    doc["version"] = 1;
    doc["p"] = sf.p;
    doc["q"] = sf.q;
    doc["m"] = sf.m;
    doc["a"] = sf.a.data;
    write_file(out_path, doc.dump() + "\n");
  } else {
    throw std::invalid_argument("unknown --to '" + to +
                                "' (expected choi or stinespring)");
  }
  return 0;
}

int cmd_bound(int p, int q, int rank, long l, double gamma, double delta,
              std::ostream& out) {
  out << "pseudo_dim_bound " << format_double(pseudo_dim_bound(p, q, rank))
      << "\n";
  out << "generalization_gap "
      << format_double(generalization_gap({p, q, rank, l, gamma, delta}))
      << "\n";
  out << "(natural-log convention)\n";
  return 0;
}

int cmd_gradcheck(int p, int q, int rank, int depth, std::uint64_t seed,
                  std::ostream& out) {
  const double dev = grad_check_max_rel(p, q, rank, depth, seed);
  out << "max_rel_deviation " << format_double(dev) << "\n";
  const double tol = depth >= 2 ? 1e-4 : 1e-5;
  if (!(dev <= tol))
    throw std::runtime_error("gradient check failed: " + format_double(dev) +
                             " > " + format_double(tol));
  return 0;
}

int cmd_baseline(const std::string& data_path, const std::string& test_path,
                 const std::string& method, const std::string& grid_text,
                 const TrainConfig& cfg, std::ostream& out) {
  const Dataset train_data = load_dataset(data_path);
  const Dataset test_data =
      test_path.empty() ? train_data : load_dataset(test_path);
  std::vector<int> grid;
  {
    std::istringstream in(grid_text);
    std::string tok;
    while (std::getline(in, tok, ',')) grid.push_back(std::stoi(tok));
  }
  if (grid.empty()) throw std::invalid_argument("--rank-grid is empty");

  out << "method,rank,train_mse,test_mse\n";
  auto report = [&](const std::string& name, int rank,
                    const std::function<Mat(const Mat&)>& predict) {
    out << name << "," << rank << ","
        << format_double(mean_entry_mse(train_data, predict)) << ","
        << format_double(mean_entry_mse(test_data, predict)) << "\n";
  };

  if (method == "mlr") {
    const LinearMapCoeffs b = fit_multivariate_ls(train_data);
    report("mlr", 0, [&](const Mat& x) { return b.predict(x); });
  } else if (method == "rrr") {
    const int kmax =
        std::min(train_data.p * train_data.p, train_data.q * train_data.q);
    for (int k : grid) {
      if (k < 1 || k > kmax) continue;
      const LinearMapCoeffs b = fit_reduced_rank(train_data, k);
      report("rrr", k, [&](const Mat& x) { return b.predict(x); });
    }
  } else if (method == "tr") {
    for (int r : grid) {
      const TraceRegressionModel model =
          fit_trace_regression(train_data, r, cfg);
      report("tr", r, [&](const Mat& x) { return model.predict(x); });
    }
  } else {
    throw std::invalid_argument("unknown --method '" + method +
                                "' (expected tr, mlr or rrr)");
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"partial trace regression toolkit"};
  app.require_subcommand(1);

  try {
    const std::uint64_t seed_fallback = default_seed();

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
    int sim_p = 0, sim_q = 0, sim_rank = 0, sim_n = 0;
    double sim_sigma = 0.0, sim_scale = -1.0;
    std::uint64_t sim_seed = seed_fallback;
    std::string sim_out, sim_law = "psd";
    bool sim_general = false;
    sim->add_option("--p", sim_p)->required();
    sim->add_option("--q", sim_q)->required();
    sim->add_option("--rank", sim_rank)->required();
    sim->add_option("--n", sim_n)->required();
    sim->add_option("--sigma", sim_sigma);
    sim->add_option("--seed", sim_seed);
    sim->add_option("--scale", sim_scale,
                    "operator std, negative selects 1/sqrt(p*rank)");
    sim->add_option("--input-law", sim_law, "psd or gaussian");
    sim->add_flag("--general", sim_general,
                  "two-parameter targets tr_m(A X B^T), still CP-fitted");
    sim->add_option("--out", sim_out)->required();

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "train a stacked model");
    std::string fit_data, fit_arch, fit_out, fit_log, fit_opt = "adam";
    double fit_lr = 0.001, fit_init = -1.0;
    int fit_epochs = 100, fit_batch = 16;
    std::uint64_t fit_seed = seed_fallback;
    fit_cmd->add_option("--data", fit_data)->required();
    fit_cmd->add_option("--arch", fit_arch, "layers as q1:r1[,q2:r2...]")
        ->required();
    fit_cmd->add_option("--lr", fit_lr);
    fit_cmd->add_option("--epochs", fit_epochs);
    fit_cmd->add_option("--batch", fit_batch);
    fit_cmd->add_option("--seed", fit_seed);
    fit_cmd->add_option("--optimizer", fit_opt, "adam or sgd");
    fit_cmd->add_option("--init-scale", fit_init,
                        "negative selects 1/sqrt(p_k*r_k)");
    fit_cmd->add_option("--out", fit_out)->required();
    fit_cmd->add_option("--log", fit_log, "per-epoch loss CSV");

    // predict
    auto* pred = app.add_subcommand("predict", "forward pass over a dataset");
    std::string pred_model, pred_data, pred_out;
    pred->add_option("--model", pred_model)->required();
    pred->add_option("--data", pred_data)->required();
    pred->add_option("--out", pred_out)->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "per-entry mean MSE");
    std::string eval_model, eval_data;
    eval_cmd->add_option("--model", eval_model)->required();
    eval_cmd->add_option("--data", eval_data)->required();

    // complete
    auto* comp = app.add_subcommand("complete", "PSD matrix completion");
    std::string comp_matrix, comp_out, comp_grid_ranks = "1,5,10,30";
    int comp_p = 0, comp_q = 0, comp_rank = 0, comp_depth = 1;
    int comp_epochs = 100, comp_batch = 16;
    double comp_lr = 0.001;
    std::uint64_t comp_seed = seed_fallback;
    bool comp_grid = false;
    comp->add_option("--matrix", comp_matrix)->required();
    comp->add_option("--p", comp_p);
    comp->add_option("--q", comp_q);
    comp->add_option("--rank", comp_rank);
    comp->add_option("--depth", comp_depth);
    comp->add_option("--epochs", comp_epochs);
    comp->add_option("--batch", comp_batch);
    comp->add_option("--lr", comp_lr);
    comp->add_option("--seed", comp_seed);
    comp->add_flag("--grid", comp_grid,
                   "sweep (p, q, rank), scored on a 20% observed holdout");
    comp->add_option("--rank-grid", comp_grid_ranks);
    comp->add_option("--out", comp_out)->required();

    // convert
    auto* conv = app.add_subcommand("convert", "model representations");
    std::string conv_model, conv_to, conv_out;
    conv->add_option("--model", conv_model)->required();
    conv->add_option("--to", conv_to, "choi or stinespring")->required();
    conv->add_option("--out", conv_out)->required();

    // bound
    auto* bound = app.add_subcommand("bound", "generalization calculators");
    int bnd_p = 0, bnd_q = 0, bnd_rank = 0;
    long bnd_l = 0;
    double bnd_gamma = 1.0, bnd_delta = 0.05;
    bound->add_option("--p", bnd_p)->required();
    bound->add_option("--q", bnd_q)->required();
    bound->add_option("--rank", bnd_rank)->required();
    bound->add_option("--l", bnd_l)->required();
    bound->add_option("--gamma", bnd_gamma);
    bound->add_option("--delta", bnd_delta);

    // gradcheck
    auto* gc = app.add_subcommand("gradcheck", "finite-difference oracle");
    int gc_p = 4, gc_q = 3, gc_rank = 2, gc_depth = 1;
    std::uint64_t gc_seed = seed_fallback;
    gc->add_option("--p", gc_p);
    gc->add_option("--q", gc_q);
    gc->add_option("--rank", gc_rank);
    gc->add_option("--depth", gc_depth);
    gc->add_option("--seed", gc_seed);

    // baseline
    auto* base = app.add_subcommand("baseline", "comparison methods");
    std::string base_data, base_test, base_method,
        base_grid = "1,2,5,10,20,50,100";
    double base_lr = 0.001;
    int base_epochs = 100, base_batch = 16;
    std::uint64_t base_seed = seed_fallback;
    base->add_option("--data", base_data)->required();
    base->add_option("--test", base_test);
    base->add_option("--method", base_method, "tr, mlr or rrr")->required();
    base->add_option("--rank-grid", base_grid);
    base->add_option("--lr", base_lr);
    base->add_option("--epochs", base_epochs);
    base->add_option("--batch", base_batch);
    base->add_option("--seed", base_seed);

    std::vector<const char*> argv;
    argv.push_back("ptreg");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
      out << app.help();
      return 0;
    } catch (const CLI::ParseError& e) {
      err << "usage error: " << e.what() << "\n";
      return 1;
    }

    if (sim->parsed())
      return cmd_simulate(sim_p, sim_q, sim_rank, sim_n, sim_sigma, sim_seed,
                          sim_scale, sim_law, sim_general, sim_out);
    if (fit_cmd->parsed())
      return cmd_fit(fit_data, fit_arch,
                     make_config(fit_lr, fit_epochs, fit_batch, fit_seed,
                                 fit_opt, fit_init),
                     fit_out, fit_log, out);
    if (pred->parsed()) return cmd_predict(pred_model, pred_data, pred_out);
    if (eval_cmd->parsed()) return cmd_eval(eval_model, eval_data, out);
    if (comp->parsed())
      return cmd_complete(comp_matrix, comp_p, comp_q, comp_rank, comp_depth,
                          make_config(comp_lr, comp_epochs, comp_batch,
                                      comp_seed, "adam", -1.0),
                          comp_grid, comp_grid_ranks, comp_out, out);
    if (conv->parsed()) return cmd_convert(conv_model, conv_to, conv_out);
    if (bound->parsed())
      return cmd_bound(bnd_p, bnd_q, bnd_rank, bnd_l, bnd_gamma, bnd_delta,
                       out);
    if (gc->parsed()) return cmd_gradcheck(gc_p, gc_q, gc_rank, gc_depth,
                                           gc_seed, out);
    if (base->parsed())
      return cmd_baseline(base_data, base_test, base_method, base_grid,
                          make_config(base_lr, base_epochs, base_batch,
                                      base_seed, "adam", -1.0),
                          out);
    err << "usage error: no subcommand given\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace ptreg
