#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <map>
#include <optional>

#include <fmt/format.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "cadret/brep/generator.hpp"
#include "cadret/brep/part_io.hpp"
#include "cadret/core/binary_io.hpp"
#include "cadret/core/error.hpp"
#include "cadret/core/hash.hpp"
#include "cadret/features/cache.hpp"
#include "cadret/retrieval/retrieval.hpp"
#include "cadret/train/train.hpp"

namespace cadret::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kArtifactVersion = 1;

std::string config_hash(const json& config) { return sha256_hex(config.dump()); }

json read_json(const fs::path& path) {
  json j = json::parse(read_file_text(path), nullptr, false);
  require(!j.is_discarded(), ErrorKind::Format, path.string() + ": invalid JSON");
  return j;
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

// Provenance block carried by every artifact.
json provenance(const json& config, std::uint64_t seed) {
  return {{"format_version", kArtifactVersion}, {"config_hash", config_hash(config)}, {"seed", seed}};
}

// Routes spdlog to `err` for one invocation and restores the previous default
// logger afterwards, since `err` may not outlive the call.
class LogScope {
 public:
  explicit LogScope(std::ostream& err);
  ~LogScope() { spdlog::set_default_logger(previous_); }

 private:
  std::shared_ptr<spdlog::logger> previous_ = spdlog::default_logger();
};

LogScope::LogScope(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("cadret", sink);
  logger->set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::info;
  if (const char* env = std::getenv("CADRET_LOG")) {
    level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string_view(env) != "off") level = spdlog::level::info;
  }
  logger->set_level(level);
  spdlog::set_default_logger(logger);
}

// Family id per part from a labels file ({"labels": {part: family}}).
std::map<std::string, std::string> read_family_labels(const json& j, const fs::path& path) {
  require(j.contains("labels") && j.at("labels").is_object(), ErrorKind::Format,
          path.string() + ": expected a \"labels\" object mapping part id to family");
  return j.at("labels").get<std::map<std::string, std::string>>();
}

features::AttrSchema load_schema(const std::string& path) {
  return path.empty() ? features::default_schema() : features::read_schema(path);
}

// ---- generate ---------------------------------------------------------------

struct GenerateArgs {
  std::string out, labels, families;
  int count = 20;
  int num_families = 10;
  std::uint64_t seed = 0;
};

void cmd_generate(const GenerateArgs& a, std::ostream& out) {
  std::vector<brep::FamilySpec> families;
  if (a.families.empty()) {
    families = brep::default_families();
    require(a.num_families >= 1 && std::size_t(a.num_families) <= families.size(), ErrorKind::Spec,
            "--num-families must lie in [1, " + std::to_string(families.size()) + "]");
    families.resize(a.num_families);
  } else {
    const json j = read_json(a.families);
    require(j.is_array(), ErrorKind::Spec, a.families + ": expected an array of family specs");
    for (const json& f : j) families.push_back(brep::family_from_json(f));
  }
  json family_json = json::array();
  for (const auto& f : families) family_json.push_back(brep::family_to_json(f));
  const json config = {{"families", family_json}, {"count", a.count}, {"seed", a.seed}};

  std::vector<brep::BRepPart> parts;
  json labels = json::object();
  for (const auto& f : families) {
    for (brep::BRepPart& p : brep::generate_synthetic_family(f, a.count, a.seed)) {
      require(!labels.contains(p.id), ErrorKind::Spec, "duplicate part id '" + p.id + "' across families");
      labels[p.id] = f.name;
      parts.push_back(std::move(p));
    }
  }
  brep::write_parts_jsonl(a.out, parts);
  json label_file = provenance(config, a.seed);
  label_file["labels"] = labels;
  write_json(a.labels, label_file);
  out << fmt::format("generated {} parts in {} families -> {}\n", parts.size(), families.size(), a.out);
}

// ---- convert ----------------------------------------------------------------

struct ConvertArgs {
  std::string parts, schema, out, report;
  std::uint16_t gu = 10, gv = 10, gt = 10;
};

void cmd_convert(const ConvertArgs& a, std::ostream& out) {
  const features::AttrSchema schema = load_schema(a.schema);
  const features::GridSpec grid{a.gu, a.gv, a.gt};
  const std::vector<brep::BRepPart> parts = brep::read_parts_jsonl(a.parts);
  std::vector<features::GraphFeatures> graphs;
  json report = json::array();
  std::size_t skipped = 0;
  for (const brep::BRepPart& p : parts) {
    features::Featurized f = features::featurize(p, schema, grid);
    const auto& r = f.report;
    skipped += r.single_face_curves.size();
    report.push_back({{"part", p.id},
                      {"nodes", f.features.graph.nodes.size()},
                      {"edges", f.features.graph.edges.size()},
                      {"single_face_curves", r.single_face_curves},
                      {"orphan_curves", r.orphan_curves},
                      {"multi_face_curves", r.multi_face_curves},
                      {"duplicate_pairs", r.duplicate_pairs}});
    for (const std::string& c : r.single_face_curves) spdlog::debug("{}: curve '{}' has one face, no edge", p.id, c);
    graphs.push_back(std::move(f.features));
  }
  const json config = {{"schema", features::schema_to_json(schema)},
                       {"grid", {grid.gu, grid.gv, grid.gt}},
                       {"parts_sha256", sha256_hex(read_file_text(a.parts))}};
  json meta = provenance(config, 0);
  meta.erase("seed");
  features::write_graph_cache(a.out, graphs, meta);
  if (!a.report.empty()) write_json(a.report, {{"format_version", kArtifactVersion}, {"parts", report}});
  out << fmt::format("converted {} parts ({} single-face curves skipped) -> {}\n", graphs.size(), skipped, a.out);
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  std::string cache, out_dir, config, audit;
  std::optional<std::uint32_t> epochs, min_epochs, batch, patience;
  std::optional<double> lr, tau, alpha, beta;
  std::optional<std::string> scheme;
  std::optional<std::uint64_t> seed;
  bool one_sided = false;
  bool include_positive = false;
};

struct Configs {
  encoder::EncoderConfig encoder;
  train::TrainConfig train;
};

Configs merge_configs(const TrainArgs& a, const std::vector<features::GraphFeatures>& graphs) {
  json file = a.config.empty() ? json::object() : read_json(a.config);
  Configs c;
  json enc = file.value("encoder", json::object());
  if (!graphs.empty()) {
    const auto& g = graphs.front();
    if (!enc.contains("grid")) enc["grid"] = {g.grid.gu, g.grid.gv, g.grid.gt};
    if (!enc.contains("product_width")) enc["product_width"] = g.product_width();
  }
  c.encoder = encoder::config_from_json(enc);
  json tr = file.value("train", json::object());
  if (file.contains("seed") && !tr.contains("seed")) tr["seed"] = file.at("seed");
  if (a.epochs) tr["max_epochs"] = *a.epochs;
  if (a.min_epochs) tr["min_epochs"] = *a.min_epochs;
  if (a.batch) tr["batch_size"] = *a.batch;
  if (a.patience) tr["patience"] = *a.patience;
  if (a.lr) tr["lr"] = *a.lr;
  if (a.tau) tr["temperature"] = *a.tau;
  if (a.seed) tr["seed"] = *a.seed;
  if (a.one_sided) tr["symmetric"] = false;
  if (a.include_positive) tr["include_positive"] = true;
  json aug = tr.value("augment", json::object());
  if (a.alpha) aug["alpha"] = *a.alpha;
  if (a.beta) aug["beta"] = *a.beta;
  if (a.scheme) aug["scheme"] = *a.scheme;
  tr["augment"] = aug;
  c.train = train::config_from_json(tr);
  return c;
}

void cmd_train(const TrainArgs& a, std::ostream& out) {
  const auto graphs = features::read_graph_cache(a.cache);
  const Configs c = merge_configs(a, graphs);
  const json config = {{"encoder", encoder::config_to_json(c.encoder)}, {"train", train::config_to_json(c.train)}};
  fs::create_directories(a.out_dir);
  train::TrainOptions opt;
  opt.checkpoint_dir = a.out_dir;
  opt.history_path = fs::path(a.out_dir) / "history.jsonl";
  if (!a.audit.empty()) opt.audit_path = a.audit;
  spdlog::info("training on {} graphs, {} parameters", graphs.size(),
               train::initial_params(c.encoder, c.train.seed).scalar_count());
  const train::TrainResult r = train::train(graphs, c.encoder, c.train, opt);
  json manifest = provenance(config, c.train.seed);
  manifest["train"] = train::config_to_json(c.train);
  manifest["best_epoch"] = r.history.best_epoch;
  manifest["best_loss"] = r.history.best_loss;
  const fs::path best = fs::path(a.out_dir) / "best.ckpt";
  nn::save_checkpoint(best, encoder::to_checkpoint(r.best, manifest));
  nn::save_checkpoint(fs::path(a.out_dir) / "last.ckpt", encoder::to_checkpoint(r.last, manifest));
  out << fmt::format("trained {} epochs, best loss {:.6f} at epoch {} -> {} (params {})\n", r.history.epochs.size(),
                     r.history.best_loss, r.history.best_epoch, best.string(), encoder::parameter_hash(r.best));
}

// ---- grid -------------------------------------------------------------------

void cmd_grid(const TrainArgs& a, const std::string& out_path, std::ostream& out) {
  const auto graphs = features::read_graph_cache(a.cache);
  const Configs c = merge_configs(a, graphs);
  json points = json::array();
  const train::GridResult r = train::grid_search(graphs, c.encoder, c.train, {}, [&](const train::GridPoint& p) {
    spdlog::info("lr {} tau {} alpha {} beta {}: final loss {:.6f}", p.lr, p.temperature, p.alpha, p.beta, p.final_loss);
  });
  for (const auto& p : r.points) {
    points.push_back({{"lr", p.lr}, {"temperature", p.temperature}, {"alpha", p.alpha}, {"beta", p.beta},
                      {"final_loss", p.final_loss}});
  }
  const json config = {{"encoder", encoder::config_to_json(c.encoder)}, {"train", train::config_to_json(c.train)}};
  json result = provenance(config, c.train.seed);
  result["points"] = points;
  result["best"] = points[r.best];
  if (out_path.empty()) {
    out << result.dump(2) << "\n";
  } else {
    write_json(out_path, result);
    out << fmt::format("best: lr {} tau {} alpha {} beta {} (loss {:.6f}) -> {}\n", r.points[r.best].lr,
                       r.points[r.best].temperature, r.points[r.best].alpha, r.points[r.best].beta,
                       r.points[r.best].final_loss, out_path);
  }
}

// ---- embed ------------------------------------------------------------------

void cmd_embed(const std::string& checkpoint, const std::string& cache, const std::string& out_path, std::ostream& out) {
  const nn::Checkpoint ckpt = nn::load_checkpoint(checkpoint);
  const auto params = encoder::from_checkpoint(ckpt);
  json cache_meta;
  const auto graphs = features::read_graph_cache(cache, &cache_meta);
  const train::Embeddings emb = train::embed_dataset(params, graphs);
  json meta = {{"format_version", kArtifactVersion},
               {"config_hash", ckpt.manifest.value("config_hash", "")},
               {"seed", ckpt.manifest.value("seed", json())},
               {"parameter_hash", encoder::parameter_hash(params)},
               {"cache_config_hash", cache_meta.value("config_hash", "")}};
  retrieval::write_index(out_path, retrieval::build_index(emb, meta));
  out << fmt::format("embedded {} parts (dim {}) -> {}\n", emb.size(), params.config.graph_dim, out_path);
}

// ---- query ------------------------------------------------------------------

struct QueryArgs {
  std::string index, part, part_file, checkpoint, schema;
  std::size_t k = 10;
};

std::size_t clamp_k(std::size_t k, std::size_t available) {
  if (k > available) {
    spdlog::warn("k = {} exceeds the {} candidates; clamped", k, available);
    return available;
  }
  return k;
}

void print_hits(const retrieval::QueryResult& hits, std::ostream& out) {
  out << "rank\tpart\tscore\n";
  for (std::size_t i = 0; i < hits.size(); ++i) out << fmt::format("{}\t{}\t{:.6f}\n", i + 1, hits[i].id, hits[i].score);
}

void cmd_query(const QueryArgs& a, std::ostream& out) {
  const retrieval::EmbeddingIndex index = retrieval::read_index(a.index);
  require(a.k >= 1, ErrorKind::Contract, "-k must be at least 1");
  if (!a.part_file.empty()) {
    require(!a.checkpoint.empty(), ErrorKind::Contract, "--part-file needs --checkpoint to embed the part");
    const auto params = encoder::from_checkpoint(nn::load_checkpoint(a.checkpoint));
    const auto parts = brep::read_parts_jsonl(a.part_file);
    require(!parts.empty(), ErrorKind::Format, a.part_file + ": no parts");
    const brep::BRepPart* part = &parts.front();
    if (!a.part.empty()) {
      part = nullptr;
      for (const auto& p : parts) {
        if (p.id == a.part) part = &p;
      }
      require(part != nullptr, ErrorKind::Contract, "part '" + a.part + "' is not in " + a.part_file);
    }
    const auto gf = features::featurize(*part, load_schema(a.schema), params.config.grid).features;
    const std::vector<float> z = encoder::encode(gf, params);
    const bool stored = index.find(part->id).has_value();
    const std::size_t k = clamp_k(a.k, index.size() - (stored ? 1 : 0));
    if (k == 0) return print_hits({}, out);
    print_hits(stored ? retrieval::query(index, z, k, part->id) : retrieval::query(index, z, k), out);
    return;
  }
  require(!a.part.empty(), ErrorKind::Contract, "give --part (an indexed part id) or --part-file");
  require(index.find(a.part).has_value(), ErrorKind::Contract, "part '" + a.part + "' is not in the index");
  const std::size_t k = clamp_k(a.k, index.size() - 1);
  if (k == 0) return print_hits({}, out);
  print_hits(retrieval::query_part(index, a.part, k), out);
}

// ---- eval -------------------------------------------------------------------

void cmd_eval(const std::string& index_path, const std::string& labels_path, std::vector<std::size_t> ks,
              const std::string& out_path, std::ostream& out) {
  const retrieval::EmbeddingIndex index = retrieval::read_index(index_path);
  const json j = read_json(labels_path);
  if (ks.empty()) ks = {5, 10};
  for (std::size_t k : ks) require(k >= 1, ErrorKind::Contract, "k must be at least 1");
  retrieval::EvalReport report;
  if (j.contains("graded")) {
    // {"graded": {query: {candidate: grade}}}
    std::map<std::string, retrieval::Labels> graded;
    for (const auto& [q, pool] : j.at("graded").items()) {
      require(index.find(q).has_value(), ErrorKind::Contract, "graded query '" + q + "' is not in the index");
      // Indexed parts missing from a query's pool grade as dissimilar.
      retrieval::Labels labels;
      for (const std::string& id : index.ids) {
        if (id != q) labels.emplace(id, retrieval::Dissimilar);
      }
      for (const auto& [c, g] : pool.items()) {
        const int grade = g.get<int>();
        require(grade >= 0 && grade <= 2, ErrorKind::Format, labels_path + ": grade must be 0, 1 or 2");
        labels[c] = grade;
      }
      graded.emplace(q, std::move(labels));
    }
    std::vector<std::string> queries;
    for (const auto& [q, pool] : graded) queries.push_back(q);
    report = retrieval::evaluate(index, ks, queries, [&](const std::string& q) { return graded.at(q); });
  } else {
    report = retrieval::evaluate_families(index, read_family_labels(j, labels_path), ks);
  }
  json result = report.to_json();
  result["format_version"] = kArtifactVersion;
  result["index_config_hash"] = index.meta.value("config_hash", "");
  result["seed"] = index.meta.value("seed", json());
  if (!out_path.empty()) write_json(out_path, result);
  out << fmt::format("queries\t{}\n", report.queries.size());
  for (const auto& [key, value] : result.at("mean").items()) out << fmt::format("{}\t{:.6f}\n", key, value.get<double>());
}

// ---- assembly -----------------------------------------------------------------

void cmd_assembly(const std::string& index_path, const std::string& db_path, const std::string& query_id,
                  std::size_t k_parts, std::size_t k_out, std::ostream& out) {
  const retrieval::EmbeddingIndex index = retrieval::read_index(index_path);
  const auto db = retrieval::read_assemblies(db_path);
  const retrieval::AssemblyRecord* q = nullptr;
  for (const auto& rec : db) {
    if (rec.id == query_id) q = &rec;
  }
  require(q != nullptr, ErrorKind::Contract, "assembly '" + query_id + "' is not in " + db_path);
  const std::size_t kp = clamp_k(k_parts, index.size());
  const auto hits = retrieval::assembly_query(*q, index, db, kp, k_out);
  out << "rank\tassembly\tvotes\n";
  for (std::size_t i = 0; i < hits.size(); ++i) out << fmt::format("{}\t{}\t{}\n", i + 1, hits[i].id, hits[i].votes);
}

void add_train_flags(CLI::App* cmd, TrainArgs& a) {
  cmd->add_option("--cache", a.cache, "Graph cache from `convert`")->required();
  cmd->add_option("--config", a.config, "JSON config with optional \"encoder\", \"train\" and \"seed\" sections");
  cmd->add_option("--epochs", a.epochs, "Maximum epochs (default 20)");
  cmd->add_option("--min-epochs", a.min_epochs, "Epochs before early stopping may trigger (default 20)");
  cmd->add_option("--batch", a.batch, "Batch size N (default 32)");
  cmd->add_option("--patience", a.patience, "Early-stop patience in epochs (default 10)");
  cmd->add_option("--lr", a.lr, "Adam learning rate (default 0.001)");
  cmd->add_option("--tau", a.tau, "NT-Xent temperature (default 1.0)");
  cmd->add_option("--alpha", a.alpha, "Feature mask ratio in [0, 0.2] (default 0.1)");
  cmd->add_option("--beta", a.beta, "Structure mask ratio in [0, 0.2] (default 0.1)");
  cmd->add_option("--scheme", a.scheme, "Structure deletion: node | node_1hop | edge_vertices");
  cmd->add_option("--seed", a.seed, "Training seed (default 0)");
  cmd->add_flag("--one-sided", a.one_sided, "Single-direction NT-Xent instead of the symmetric average");
  cmd->add_flag("--include-positive", a.include_positive, "Keep the positive pair in the NT-Xent denominator");
  cmd->add_option("--audit", a.audit, "Append per-view augmentation records to this JSONL file");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const LogScope log_scope(err);
  CLI::App app{"cadret: B-rep part graphs, contrastive shape embeddings and similarity retrieval"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cadret 0.1.0");

  std::function<void()> action;

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write synthetic part families as parts JSONL plus family labels");
  g->add_option("--out", gen.out, "Parts JSONL output")->required();
  g->add_option("--labels", gen.labels, "Labels JSON output (part id -> family)")->required();
  g->add_option("--count", gen.count, "Parts per family")->capture_default_str();
  g->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  g->add_option("--families", gen.families, "JSON array of family specs (default: built-in families)");
  g->add_option("--num-families", gen.num_families, "Number of built-in families to use")->capture_default_str();
  g->callback([&] { action = [&] { cmd_generate(gen, out); }; });

  std::string schema_out;
  auto* s = app.add_subcommand("schema", "Write the default product attribute schema");
  s->add_option("--out", schema_out, "Schema JSON output")->required();
  s->callback([&] {
    action = [&] {
      features::write_schema(schema_out, features::default_schema());
      out << "wrote " << schema_out << "\n";
    };
  });

  ConvertArgs conv;
  auto* c = app.add_subcommand("convert", "Convert parts JSONL into a graph-feature cache");
  c->add_option("--parts", conv.parts, "Parts JSONL input")->required();
  c->add_option("--out", conv.out, "Graph cache output")->required();
  c->add_option("--schema", conv.schema, "Attribute schema JSON (default: built-in schema)");
  c->add_option("--report", conv.report, "Per-part conversion report JSON output");
  c->add_option("--gu", conv.gu, "Face grid samples along u")->capture_default_str();
  c->add_option("--gv", conv.gv, "Face grid samples along v")->capture_default_str();
  c->add_option("--gt", conv.gt, "Curve grid samples")->capture_default_str();
  c->callback([&] { action = [&] { cmd_convert(conv, out); }; });

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Contrastive training; writes best.ckpt, last.ckpt and history.jsonl");
  add_train_flags(t, tr);
  t->add_option("--out-dir", tr.out_dir, "Output directory")->required();
  t->callback([&] { action = [&] { cmd_train(tr, out); }; });

  TrainArgs grid_args;
  std::string grid_out;
  auto* gr = app.add_subcommand("grid", "Grid search over lr x tau x alpha x beta, best by final training loss");
  add_train_flags(gr, grid_args);
  gr->add_option("--out", grid_out, "Results JSON output (default: stdout)");
  gr->callback([&] { action = [&] { cmd_grid(grid_args, grid_out, out); }; });

  std::string emb_ckpt, emb_cache, emb_out;
  auto* e = app.add_subcommand("embed", "Embed every part of a graph cache into an index file");
  e->add_option("--checkpoint", emb_ckpt, "Encoder checkpoint")->required();
  e->add_option("--cache", emb_cache, "Graph cache")->required();
  e->add_option("--out", emb_out, "Index output")->required();
  e->callback([&] { action = [&] { cmd_embed(emb_ckpt, emb_cache, emb_out, out); }; });

  QueryArgs qa;
  auto* q = app.add_subcommand("query", "Top-k most similar parts to an indexed part or a part file");
  q->add_option("--index", qa.index, "Index file")->required();
  q->add_option("--part", qa.part, "Query part id (in the index, or in --part-file)");
  q->add_option("--part-file", qa.part_file, "Parts JSONL holding the query part");
  q->add_option("--checkpoint", qa.checkpoint, "Encoder checkpoint (with --part-file)");
  q->add_option("--schema", qa.schema, "Attribute schema JSON (with --part-file)");
  q->add_option("-k", qa.k, "Number of results")->capture_default_str();
  q->callback([&] { action = [&] { cmd_query(qa, out); }; });

  std::string ev_index, ev_labels, ev_out;
  std::vector<std::size_t> ev_ks;
  auto* ev = app.add_subcommand("eval", "Recall@k and NDCG@k of every labeled part against the rest");
  ev->add_option("--index", ev_index, "Index file")->required();
  ev->add_option("--labels", ev_labels, "Family labels JSON or graded labels JSON")->required();
  ev->add_option("-k", ev_ks, "Cutoffs, comma separated (default 5,10)")->delimiter(',');
  ev->add_option("--out", ev_out, "Full metrics JSON output (per-query rows included)");
  ev->callback([&] { action = [&] { cmd_eval(ev_index, ev_labels, ev_ks, ev_out, out); }; });

  std::string as_index, as_db, as_query;
  std::size_t k_parts = 5, k_out = 10;
  auto* as = app.add_subcommand("assembly", "Rank assemblies by part votes for a query assembly");
  as->add_option("--index", as_index, "Index file")->required();
  as->add_option("--assemblies", as_db, "Assembly memberships JSONL")->required();
  as->add_option("--query", as_query, "Query assembly id")->required();
  as->add_option("--k-parts", k_parts, "Parts retrieved per query member")->capture_default_str();
  as->add_option("--k-out", k_out, "Assemblies returned")->capture_default_str();
  as->callback([&] { action = [&] { cmd_assembly(as_index, as_db, as_query, k_parts, k_out, out); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    for (const CLI::App* sub : app.get_subcommands()) err << sub->help();
    return 2;
  }
  try {
    action();
    return 0;
  } catch (const Error& ex) {
    spdlog::error("{}: {}", to_string(ex.kind()), ex.what());
    return exit_code_for(ex.kind());
  } catch (const nlohmann::json::exception& ex) {
    spdlog::error("format error: {}", ex.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& ex) {
    spdlog::error("io error: {}", ex.what());
    return 3;
  }
}

}  // namespace cadret::cli
