#include "cadret/train/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include <spdlog/spdlog.h>

#include "cadret/core/binary_io.hpp"
#include "cadret/core/error.hpp"
#include "cadret/nn/adam.hpp"

namespace cadret::train {

using encoder::EncoderParams;
using nn::Tensor;
using nn::Var;

void validate(const TrainConfig& cfg) {
  require(cfg.batch_size >= 2, ErrorKind::Config, "batch size must be at least 2 (NT-Xent needs a negative)");
  require(cfg.temperature > 0 && std::isfinite(cfg.temperature), ErrorKind::Config, "temperature must be positive");
  require(cfg.lr > 0 && std::isfinite(cfg.lr), ErrorKind::Config, "learning rate must be positive");
  require(cfg.max_epochs >= 1, ErrorKind::Config, "max_epochs must be at least 1");
  require(cfg.patience >= 1, ErrorKind::Config, "patience must be at least 1");
  augment::validate(cfg.augment);
}

nlohmann::json config_to_json(const TrainConfig& cfg) {
  return {{"batch_size", cfg.batch_size},
          {"temperature", cfg.temperature},
          {"lr", cfg.lr},
          {"max_epochs", cfg.max_epochs},
          {"min_epochs", cfg.min_epochs},
          {"patience", cfg.patience},
          {"augment", augment::config_to_json(cfg.augment)},
          {"symmetric", cfg.symmetric},
          {"include_positive", cfg.include_positive},
          {"seed", cfg.seed}};
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  try {
    auto opt = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    opt("batch_size", cfg.batch_size);
    opt("temperature", cfg.temperature);
    opt("lr", cfg.lr);
    opt("max_epochs", cfg.max_epochs);
    opt("min_epochs", cfg.min_epochs);
    opt("patience", cfg.patience);
    opt("symmetric", cfg.symmetric);
    opt("include_positive", cfg.include_positive);
    opt("seed", cfg.seed);
    if (j.contains("augment")) cfg.augment = augment::config_from_json(j.at("augment"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("train config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

namespace {

template <typename T>
Var<T> one_direction(nn::Tape<T>& tape, Var<T> sim, bool include_positive) {
  const std::size_t n = sim.shape()[0];
  Tensor<T> eye({n, n}), off({n, n}, T(1));
  for (std::size_t i = 0; i < n; ++i) {
    eye.at(i, i) = 1;
    if (!include_positive) off.at(i, i) = 0;
  }
  Var<T> denom = nn::sum(nn::mul(nn::exp(sim), tape.constant(std::move(off))), 1);
  Var<T> positive = nn::sum(nn::mul(sim, tape.constant(std::move(eye))), 1);
  return nn::mean_all(nn::sub(nn::log(denom), positive));
}

}  // namespace

template <typename T>
Var<T> nt_xent(Var<T> z1, Var<T> z2, T tau, bool symmetric, bool include_positive) {
  require(z1.shape() == z2.shape() && z1.shape().size() == 2, ErrorKind::Shape,
          "nt_xent: view embeddings " + nn::to_string(z1.shape()) + " and " + nn::to_string(z2.shape()) +
              " must be equal [N, D] matrices");
  require(z1.shape()[0] >= 2, ErrorKind::Contract, "nt_xent needs at least 2 pairs");
  require(tau > 0, ErrorKind::Contract, "nt_xent temperature must be positive");
  nn::Tape<T>& tape = *z1.tape;
  Var<T> loss = one_direction(tape, nn::scale(nn::cosine_similarity(z1, z2), T(1) / tau), include_positive);
  if (!symmetric) return loss;
  Var<T> reverse = one_direction(tape, nn::scale(nn::cosine_similarity(z2, z1), T(1) / tau), include_positive);
  return nn::scale(nn::add(loss, reverse), T(0.5));
}

double nt_xent_value(const Tensor<double>& z1, const Tensor<double>& z2, double tau, bool symmetric,
                     bool include_positive) {
  nn::Tape<double> tape(false);
  return nt_xent(tape.constant(z1), tape.constant(z2), tau, symmetric, include_positive).value()[0];
}

std::string TrainHistory::to_jsonl(bool with_time) const {
  std::string out;
  for (const EpochRecord& r : epochs) {
    nlohmann::json j = {{"epoch", r.epoch},
                        {"mean_loss", r.mean_loss},
                        {"batches", r.batches},
                        {"improved", r.improved},
                        {"checkpoint", r.checkpoint}};
    if (with_time) j["seconds"] = r.seconds;
    out += j.dump() + "\n";
  }
  return out;
}

EncoderParams<float> initial_params(const encoder::EncoderConfig& enc, std::uint64_t seed) {
  return encoder::init_params(enc, derive_seed(seed, fnv1a64("init")));
}

TrainResult train(const std::vector<features::GraphFeatures>& dataset, const encoder::EncoderConfig& enc,
                  const TrainConfig& cfg, const TrainOptions& options) {
  return train_from(dataset, initial_params(enc, cfg.seed), cfg, options);
}

namespace {

// Batches of batch_size over a shuffled order; a trailing singleton joins the
// previous batch so every batch has a negative.
std::vector<std::vector<std::size_t>> make_batches(std::size_t n, std::uint32_t batch_size, std::uint64_t seed,
                                                   std::uint32_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, fnv1a64("shuffle"), epoch));
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < n; i += batch_size) {
    batches.emplace_back(order.begin() + i, order.begin() + std::min(n, i + batch_size));
  }
  if (batches.size() > 1 && batches.back().size() == 1) {
    batches[batches.size() - 2].push_back(batches.back()[0]);
    batches.pop_back();
  }
  return batches;
}

std::string describe_batch(const std::vector<features::GraphFeatures>& dataset, const std::vector<std::size_t>& batch) {
  std::string ids;
  for (std::size_t i : batch) ids += (ids.empty() ? "" : ", ") + dataset[i].graph.part_id;
  return ids;
}

}  // namespace

TrainResult train_from(const std::vector<features::GraphFeatures>& dataset, EncoderParams<float> params,
                       const TrainConfig& cfg, const TrainOptions& options) {
  validate(cfg);
  encoder::validate(params.config);
  require(dataset.size() >= 2, ErrorKind::Contract,
          "training needs at least 2 graphs, got " + std::to_string(dataset.size()));
  for (const auto& gf : dataset) encoder::prepare<float>(gf, params.config);

  augment::AugmentConfig aug = cfg.augment;
  aug.seed = derive_seed(cfg.seed, cfg.augment.seed, fnv1a64("augment"));
  std::optional<augment::AuditLog> audit;
  if (options.audit_path) audit.emplace(options.audit_path->string());
  if (options.checkpoint_dir) std::filesystem::create_directories(*options.checkpoint_dir);

  nn::AdamState<float> adam;
  adam.lr = static_cast<float>(cfg.lr);
  std::vector<Tensor<float>> zeros;
  for (const auto& t : params.tensors) zeros.emplace_back(t.shape());

  TrainResult result{params, params, {}};
  std::vector<double> trace;
  std::uint32_t since_best = 0;
  const std::uint32_t min_epochs = std::min(cfg.min_epochs, cfg.max_epochs);

  for (std::uint32_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const auto batches = make_batches(dataset.size(), cfg.batch_size, cfg.seed, epoch);
    double loss_sum = 0;
    for (const auto& batch : batches) {
      nn::Tape<float> tape;
      const auto bound = encoder::bind(tape, params);
      std::vector<Var<float>> z1, z2;
      for (std::size_t i : batch) {
        const auto [v1, v2] = augment::augment_pair(dataset[i], aug, epoch);
        if (audit) {
          audit->write(augment::audit_record(v1, dataset[i].graph.part_id, epoch, 0));
          audit->write(augment::audit_record(v2, dataset[i].graph.part_id, epoch, 1));
        }
        const auto g1 = encoder::prepare<float>(v1.features, params.config);
        const auto g2 = encoder::prepare<float>(v2.features, params.config);
        z1.push_back(encoder::encode_on_tape(tape, params, bound, g1).z);
        z2.push_back(encoder::encode_on_tape(tape, params, bound, g2).z);
      }
      Var<float> loss = nt_xent(nn::concat(z1, 0), nn::concat(z2, 0), static_cast<float>(cfg.temperature),
                                cfg.symmetric, cfg.include_positive);
      const double value = loss.value()[0];
      trace.push_back(value);
      if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << "non-finite loss at epoch " << epoch << " on batch [" << describe_batch(dataset, batch)
            << "]; recent batch losses:";
        for (std::size_t k = trace.size() > 10 ? trace.size() - 10 : 0; k < trace.size(); ++k) msg << ' ' << trace[k];
        fail(ErrorKind::Numeric, msg.str());
      }
      nn::backward(tape, loss);
      std::vector<Tensor<float>*> ps;
      std::vector<const Tensor<float>*> gs;
      for (std::size_t i = 0; i < params.count(); ++i) {
        ps.push_back(&params.tensors[i]);
        const Tensor<float>* g = tape.grad_if_any(bound[i].id);
        gs.push_back(g ? g : &zeros[i]);
      }
      nn::adam_step(ps, gs, adam);
      loss_sum += value;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.batches = batches.size();
    rec.mean_loss = loss_sum / static_cast<double>(batches.size());
    rec.improved = result.history.epochs.empty() || rec.mean_loss < result.history.best_loss;
    if (rec.improved) {
      result.history.best_loss = rec.mean_loss;
      result.history.best_epoch = epoch;
      result.best = params;
      since_best = 0;
      if (options.checkpoint_dir) {
        const auto path = *options.checkpoint_dir / "best.ckpt";
        nlohmann::json manifest = {{"train", config_to_json(cfg)}, {"epoch", epoch}, {"mean_loss", rec.mean_loss}};
        nn::save_checkpoint(path, encoder::to_checkpoint(params, manifest));
        rec.checkpoint = path.string();
      }
    } else {
      ++since_best;
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    spdlog::info("epoch {} loss {:.6f} ({} batches, {:.1f}s){}", epoch, rec.mean_loss, rec.batches, rec.seconds,
                 rec.improved ? " *" : "");
    result.history.epochs.push_back(rec);
    if (options.history_path) write_file_atomic(*options.history_path, result.history.to_jsonl());
    if (options.on_epoch) options.on_epoch(rec);
    if (epoch >= min_epochs && since_best >= cfg.patience) {
      result.history.stopped_early = epoch < cfg.max_epochs;
      break;
    }
  }
  result.last = std::move(params);
  return result;
}

Embeddings embed_dataset(const EncoderParams<float>& params, const std::vector<features::GraphFeatures>& dataset) {
  Embeddings out;
  out.reserve(dataset.size());
  for (const auto& gf : dataset) out.emplace_back(gf.graph.part_id, encoder::encode(gf, params));
  return out;
}

GridResult grid_search(const std::vector<features::GraphFeatures>& dataset, const encoder::EncoderConfig& enc,
                       const TrainConfig& base, const GridSpace& space,
                       const std::function<void(const GridPoint&)>& on_point) {
  GridResult out;
  for (double lr : space.lr) {
    for (double tau : space.temperature) {
      for (double alpha : space.alpha) {
        for (double beta : space.beta) {
          TrainConfig cfg = base;
          cfg.lr = lr;
          cfg.temperature = tau;
          cfg.augment.alpha = alpha;
          cfg.augment.beta = beta;
          const TrainResult r = train(dataset, enc, cfg);
          GridPoint p{lr, tau, alpha, beta, r.history.epochs.back().mean_loss};
          if (on_point) on_point(p);
          if (out.points.empty() || p.final_loss < out.points[out.best].final_loss) out.best = out.points.size();
          out.points.push_back(p);
        }
      }
    }
  }
  require(!out.points.empty(), ErrorKind::Config, "grid search space is empty");
  return out;
}

template Var<float> nt_xent(Var<float>, Var<float>, float, bool, bool);
template Var<double> nt_xent(Var<double>, Var<double>, double, bool, bool);

}  // namespace cadret::train
