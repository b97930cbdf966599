#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "cadret/brep/generator.hpp"
#include "cadret/core/error.hpp"
#include "cadret/train/train.hpp"
#include "support/gradcheck.hpp"
#include "support/graphs.hpp"

using namespace cadret;
using namespace cadret::train;
using nn::Tensor;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Contract;
}

Tensor<double> identical_rows(std::size_t n, const std::vector<double>& v) {
  Tensor<double> t({n, v.size()});
  for (std::size_t i = 0; i < n; ++i) std::copy(v.begin(), v.end(), t.data() + i * v.size());
  return t;
}

std::vector<features::GraphFeatures> small_dataset(std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  std::vector<features::GraphFeatures> out;
  for (std::size_t i = 0; i < count; ++i) {
    auto gf = testing::random_features(rng, testing::random_graph(rng, 3 + rng.index(6), 0.4), testing::tiny_config().grid);
    gf.graph.part_id = "p" + std::to_string(i);
    out.push_back(std::move(gf));
  }
  return out;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("cadret_train_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("train") {
  TEST_CASE("identical embeddings: loss = ln(N - 1)") {
    Rng rng(1);
    for (std::size_t n : {2u, 3u, 4u, 8u}) {
      for (double tau : {0.5, 1.0, 2.0}) {
        const auto z = identical_rows(n, testing::random_vector(rng, 5));
        for (bool symmetric : {false, true}) {
          CHECK(std::fabs(nt_xent_value(z, z, tau, symmetric) - std::log(double(n - 1))) <= 1e-9);
        }
      }
    }
    const auto z = identical_rows(3, {1, 2, 3});
    CHECK(std::fabs(nt_xent_value(z, z, 1.0) - 0.693147180559945) <= 1e-9);
  }

  TEST_CASE("N = 2 orthogonal pairs, tau = 1: single-direction loss is -1") {
    const Tensor<double> z({2, 2}, std::vector<double>{1, 0, 0, 1});
    CHECK(std::fabs(nt_xent_value(z, z, 1.0, false) - -1.0) <= 1e-12);
    CHECK(std::fabs(nt_xent_value(z, z, 1.0, true) - -1.0) <= 1e-12);
    CHECK(std::fabs(nt_xent_value(z, z, 0.5, false) - -2.0) <= 1e-12);
    // Denominator with the positive: -log(e / (e + 1)).
    CHECK(std::fabs(nt_xent_value(z, z, 1.0, false, true) - std::log1p(std::exp(-1.0))) <= 1e-12);
  }

  TEST_CASE("loss is invariant to uniform positive scaling") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Rng rng(seed);
      const auto a = testing::random_tensor(rng, {6, 4}), b = testing::random_tensor(rng, {6, 4});
      auto scaled = [](Tensor<double> t, double s) {
        for (std::size_t i = 0; i < t.size(); ++i) t[i] *= s;
        return t;
      };
      const double base = nt_xent_value(a, b, 0.7);
      CHECK(nt_xent_value(scaled(a, 4), scaled(b, 4), 0.7) == base);
      CHECK(std::fabs(nt_xent_value(scaled(a, 5), scaled(b, 5), 0.7) - base) <= 1e-12);
    }
  }

  TEST_CASE("raising one positive similarity with everything else fixed lowers the loss") {
    // Pair 0 lives in two private dimensions, so rotating z''_0 toward z'_0
    // changes only sim(z'_0, z''_0).
    Rng rng(3);
    const std::size_t n = 5, d = 6;
    Tensor<double> z1({n, d}), z2({n, d});
    for (std::size_t i = 1; i < n; ++i) {
      for (std::size_t k = 2; k < d; ++k) {
        z1.at(i, k) = rng.uniform(-1, 1);
        z2.at(i, k) = rng.uniform(-1, 1);
      }
    }
    z1.at(0, 0) = 1;
    double prev = INFINITY;
    for (double theta = 3.0; theta >= 0; theta -= 0.25) {
      z2.at(0, 0) = std::cos(theta);
      z2.at(0, 1) = std::sin(theta);
      const double loss = nt_xent_value(z1, z2, 1.0, false);
      CHECK(loss < prev);
      prev = loss;
    }
  }

  TEST_CASE("NT-Xent gradients match central differences for every flag combination") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Rng rng(seed);
      const std::size_t n = 2 + rng.index(5);
      const std::vector<Tensor<double>> inputs{testing::random_tensor(rng, {n, 4}), testing::random_tensor(rng, {n, 4})};
      for (int flags = 0; flags < 4; ++flags) {
        const auto r = testing::check_gradients(inputs, [&](nn::Tape<double>&, const std::vector<nn::Var<double>>& v) {
          return nt_xent(v[0], v[1], 0.7, flags & 1, (flags & 2) != 0);
        });
        CHECK(r.max_rel_err <= 1e-4);
      }
    }
  }

  TEST_CASE("loss contract and numeric guards") {
    const Tensor<double> one({1, 3}, 1.0);
    CHECK(kind_of([&] { nt_xent_value(one, one, 1.0); }) == ErrorKind::Contract);
    Tensor<double> zero_row({2, 3}, 1.0);
    for (int k = 0; k < 3; ++k) zero_row.at(1, k) = 0;
    CHECK(kind_of([&] { nt_xent_value(zero_row, zero_row, 1.0); }) == ErrorKind::Numeric);
    CHECK(kind_of([&] { nt_xent_value(Tensor<double>({2, 3}, 1.0), Tensor<double>({3, 3}, 1.0), 1.0); }) ==
          ErrorKind::Shape);
  }

  TEST_CASE("config JSON round trip and validation") {
    TrainConfig c;
    c.batch_size = 8;
    c.temperature = 0.5;
    c.symmetric = false;
    c.augment.scheme = augment::Scheme::EdgeVertices;
    CHECK(config_from_json(config_to_json(c)) == c);
    CHECK(kind_of([] { config_from_json({{"batch_size", 1}}); }) == ErrorKind::Config);
    CHECK(kind_of([] { config_from_json({{"temperature", 0}}); }) == ErrorKind::Config);
    CHECK(kind_of([] { config_from_json({{"augment", {{"alpha", 0.5}}}}); }) == ErrorKind::Config);
  }

  TEST_CASE("N = 2 smoke run, 1 epoch: completes and writes one checkpoint") {
    const auto dir = scratch("smoke");
    TrainConfig cfg;
    cfg.batch_size = 2;
    cfg.max_epochs = 1;
    TrainOptions opt;
    opt.checkpoint_dir = dir;
    opt.history_path = dir / "history.jsonl";
    const auto r = train::train(small_dataset(1, 5), testing::tiny_config(), cfg, opt);
    REQUIRE(r.history.epochs.size() == 1);
    CHECK(r.history.epochs[0].batches == 2);  // 2 + 3 after folding the trailing singleton
    std::size_t checkpoints = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) checkpoints += entry.path().extension() == ".ckpt";
    CHECK(checkpoints == 1);
    const auto loaded = encoder::from_checkpoint(nn::load_checkpoint(dir / "best.ckpt"));
    CHECK(encoder::parameter_hash(loaded) == encoder::parameter_hash(r.best));
    CHECK(std::filesystem::exists(dir / "history.jsonl"));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("same seed twice: identical history and checkpoint hash") {
    TrainConfig cfg;
    cfg.batch_size = 4;
    cfg.max_epochs = 3;
    cfg.augment = {0.2, 0.2, augment::Scheme::Node1Hop, 5};
    const auto data = small_dataset(2, 9);
    const auto a = train::train(data, testing::tiny_config(), cfg);
    const auto b = train::train(data, testing::tiny_config(), cfg);
    CHECK(a.history.to_jsonl(false) == b.history.to_jsonl(false));
    CHECK(encoder::parameter_hash(a.best) == encoder::parameter_hash(b.best));
    CHECK(encoder::parameter_hash(a.last) == encoder::parameter_hash(b.last));
    cfg.seed = 1;
    const auto c = train::train(data, testing::tiny_config(), cfg);
    CHECK(encoder::parameter_hash(a.last) != encoder::parameter_hash(c.last));
  }

  TEST_CASE("early stopping waits for min_epochs and then for patience") {
    TrainConfig cfg;
    cfg.batch_size = 3;
    cfg.lr = 0.005;
    cfg.max_epochs = 40;
    cfg.min_epochs = 6;
    cfg.patience = 2;
    const auto r = train::train(small_dataset(3, 7), testing::tiny_config(), cfg);
    const auto& e = r.history.epochs;
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(e[i].epoch == i + 1);
    if (r.history.stopped_early) {
      CHECK(e.size() >= cfg.min_epochs);
      CHECK(!e[e.size() - 1].improved);
      CHECK(!e[e.size() - 2].improved);
    } else {
      CHECK(e.size() == cfg.max_epochs);
    }
    double best = INFINITY;
    for (const auto& rec : e) {
      CHECK(rec.improved == (rec.mean_loss < best));
      best = std::min(best, rec.mean_loss);
    }
    CHECK(r.history.best_loss == best);
  }

  TEST_CASE("non-finite loss aborts with batch ids") {
    auto params = initial_params(testing::tiny_config(), 0);
    params.tensors[params.index("readout2.b")][0] = NAN;
    TrainConfig cfg;
    cfg.batch_size = 2;
    cfg.max_epochs = 1;
    try {
      train_from(small_dataset(4, 4), params, cfg);
      FAIL("expected a Numeric error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Numeric);
    }
  }

  TEST_CASE("training needs two graphs") {
    CHECK(kind_of([] { train::train(small_dataset(5, 1), testing::tiny_config(), {}); }) == ErrorKind::Contract);
  }

  TEST_CASE("embed_dataset: one embedding per part, repeatable, isomorphic copies agree") {
    const auto params = initial_params(testing::tiny_config(), 7);
    auto data = small_dataset(6, 6);
    Rng rng(8);
    auto copy = testing::relabel(rng, data[0]);
    copy.graph.part_id = "copy";
    data.push_back(copy);
    const auto a = embed_dataset(params, data), b = embed_dataset(params, data);
    CHECK(a.size() == data.size());
    CHECK(a == b);
    CHECK(a.front().second == a.back().second);
    CHECK(a.back().first == "copy");
    auto wide = data;
    wide[0].product_layout.push_back({features::AttrType::Real, 1});
    CHECK(kind_of([&] { embed_dataset(params, wide); }) == ErrorKind::Config);
  }

  TEST_CASE("grid search picks the lowest final training loss") {
    TrainConfig base;
    base.batch_size = 4;
    base.max_epochs = 1;
    GridSpace space{{0.005, 0.0005}, {1.0}, {0.0, 0.1}, {0.1}};
    const auto r = grid_search(small_dataset(9, 8), testing::tiny_config(), base, space);
    REQUIRE(r.points.size() == 4);
    for (const auto& p : r.points) CHECK(r.points[r.best].final_loss <= p.final_loss);
    CHECK(r.points[1].alpha == 0.1);
    CHECK(r.points[2].lr == 0.0005);
  }

  TEST_CASE("synthetic 10-family dataset, default config: epoch 20 loss below epoch 1") {
    const auto schema = features::default_schema();
    std::vector<features::GraphFeatures> data;
    for (const auto& family : brep::default_families()) {
      for (const auto& part : brep::generate_synthetic_family(family, 20, 1)) {
        data.push_back(features::featurize(part, schema).features);
      }
    }
    TrainConfig cfg;
    cfg.max_epochs = 20;
    const auto r = train::train(data, encoder::default_config(schema), cfg);
    REQUIRE(r.history.epochs.size() == 20);
    CHECK(r.history.epochs[19].mean_loss < r.history.epochs[0].mean_loss);
  }
}
