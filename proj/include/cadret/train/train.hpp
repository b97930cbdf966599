#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cadret/augment/augment.hpp"
#include "cadret/encoder/encoder.hpp"

namespace cadret::train {

struct TrainConfig {
  std::uint32_t batch_size = 32;
  double temperature = 1.0;
  double lr = 0.001;
  std::uint32_t max_epochs = 20;
  // Early stopping never triggers before min_epochs (capped at max_epochs).
  std::uint32_t min_epochs = 20;
  std::uint32_t patience = 10;
  augment::AugmentConfig augment;
  bool symmetric = true;
  // Adds the positive pair to the NT-Xent denominator.
  bool include_positive = false;
  std::uint64_t seed = 0;
  bool operator==(const TrainConfig&) const = default;
};

// Throws Error(Config).
void validate(const TrainConfig& cfg);
nlohmann::json config_to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const nlohmann::json& j);

// Mean over rows n of -log(exp(s_nn / tau) / sum_{m != n} exp(s_nm / tau)),
// s = cosine similarity between rows of z1 and z2. `symmetric` averages with
// the (z2, z1) direction; `include_positive` keeps m = n in the denominator.
// Throws Error(Contract) for fewer than 2 rows, Error(Numeric) for a zero row.
template <typename T>
nn::Var<T> nt_xent(nn::Var<T> z1, nn::Var<T> z2, T tau, bool symmetric = true, bool include_positive = false);

double nt_xent_value(const nn::Tensor<double>& z1, const nn::Tensor<double>& z2, double tau, bool symmetric = true,
                     bool include_positive = false);

struct EpochRecord {
  std::uint32_t epoch = 0;  // 1-based
  double mean_loss = 0;
  std::size_t batches = 0;
  double seconds = 0;
  bool improved = false;
  std::string checkpoint;  // path written this epoch, empty if none
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::uint32_t best_epoch = 0;
  double best_loss = 0;
  bool stopped_early = false;

  // One JSON object per epoch; wall time only when `with_time`.
  std::string to_jsonl(bool with_time = true) const;
};

struct TrainOptions {
  // When set, best.ckpt is rewritten on every improvement.
  std::optional<std::filesystem::path> checkpoint_dir;
  std::optional<std::filesystem::path> history_path;
  std::optional<std::filesystem::path> audit_path;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  encoder::EncoderParams<float> best;  // parameters at the best epoch
  encoder::EncoderParams<float> last;
  TrainHistory history;
};

// Initial encoder parameters for a training seed.
encoder::EncoderParams<float> initial_params(const encoder::EncoderConfig& enc, std::uint64_t seed);

// Contrastive training. Throws Error(Contract) for fewer than 2 graphs and
// Error(Numeric) with batch ids and the loss trace on a non-finite loss.
TrainResult train(const std::vector<features::GraphFeatures>& dataset, const encoder::EncoderConfig& enc,
                  const TrainConfig& cfg, const TrainOptions& options = {});

// Same, continuing from given parameters.
TrainResult train_from(const std::vector<features::GraphFeatures>& dataset, encoder::EncoderParams<float> params,
                       const TrainConfig& cfg, const TrainOptions& options = {});

using Embeddings = std::vector<std::pair<std::string, std::vector<float>>>;

// One embedding per graph, in dataset order, without augmentation.
// Throws Error(Config) when the dataset features do not fit the encoder.
Embeddings embed_dataset(const encoder::EncoderParams<float>& params,
                         const std::vector<features::GraphFeatures>& dataset);

struct GridPoint {
  double lr = 0;
  double temperature = 0;
  double alpha = 0;
  double beta = 0;
  double final_loss = 0;
};

struct GridSpace {
  std::vector<double> lr{0.005, 0.001, 0.0005};
  std::vector<double> temperature{0.5, 1.0, 2.0};
  std::vector<double> alpha{0.0, 0.1, 0.2};
  std::vector<double> beta{0.0, 0.1, 0.2};
};

struct GridResult {
  std::vector<GridPoint> points;  // in (lr, tau, alpha, beta) loop order
  std::size_t best = 0;           // lowest final training loss, first on ties
};

GridResult grid_search(const std::vector<features::GraphFeatures>& dataset, const encoder::EncoderConfig& enc,
                       const TrainConfig& base, const GridSpace& space = {},
                       const std::function<void(const GridPoint&)>& on_point = {});

}  // namespace cadret::train
