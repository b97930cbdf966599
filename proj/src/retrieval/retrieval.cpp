#include "cadret/retrieval/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "cadret/core/binary_io.hpp"
#include "cadret/core/error.hpp"
#include "cadret/kernels/kernels.hpp"

namespace cadret::retrieval {

namespace {

constexpr std::string_view kMagic = "CRIX";

double norm_of(std::span<const float> v) {
  double s = 0;
  for (float x : v) s += double(x) * double(x);
  return std::sqrt(s);
}

void compute_norms(EmbeddingIndex& index) {
  index.norms.resize(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const double n = norm_of(index.row(i));
    require(n > 0 && std::isfinite(n), ErrorKind::Degenerate,
            "embedding of part '" + index.ids[i] + "' is zero or non-finite");
    index.norms[i] = n;
  }
}

bool ranks_before(const Hit& a, const Hit& b) { return a.score != b.score ? a.score > b.score : a.id < b.id; }

}  // namespace

std::optional<std::size_t> EmbeddingIndex::find(std::string_view id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return i;
  }
  return std::nullopt;
}

EmbeddingIndex build_index(const std::vector<std::pair<std::string, std::vector<float>>>& embeddings,
                           nlohmann::json meta) {
  require(!embeddings.empty(), ErrorKind::Contract, "cannot build an empty index");
  EmbeddingIndex index;
  index.dim = embeddings.front().second.size();
  index.meta = std::move(meta);
  require(index.dim > 0, ErrorKind::Shape, "embeddings have zero dimension");
  std::unordered_set<std::string> seen;
  index.matrix.reserve(embeddings.size() * index.dim);
  for (const auto& [id, z] : embeddings) {
    require(z.size() == index.dim, ErrorKind::Shape,
            "embedding of part '" + id + "' has dim " + std::to_string(z.size()) + ", expected " +
                std::to_string(index.dim));
    require(seen.insert(id).second, ErrorKind::Contract, "duplicate part id '" + id + "' in index");
    index.ids.push_back(id);
    index.matrix.insert(index.matrix.end(), z.begin(), z.end());
  }
  compute_norms(index);
  return index;
}

std::vector<std::uint8_t> encode_index(const EmbeddingIndex& index) {
  ByteWriter w;
  w.raw(kMagic);
  w.u8(kIndexVersion);
  w.u64(index.size());
  w.u32(static_cast<std::uint32_t>(index.dim));
  w.str(index.meta.dump());
  for (const std::string& id : index.ids) w.str(id);
  w.f32s(index.matrix);
  return std::move(w).take();
}

EmbeddingIndex decode_index(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  require(bytes.size() >= kMagic.size() && r.raw(kMagic.size()) == kMagic, ErrorKind::Format,
          "not an index file (bad magic)");
  const std::uint8_t version = r.u8();
  require(version == kIndexVersion, ErrorKind::Format, "unsupported index version " + std::to_string(version));
  EmbeddingIndex index;
  const std::uint64_t m = r.u64();
  index.dim = r.u32();
  index.meta = nlohmann::json::parse(r.str(), nullptr, false);
  require(!index.meta.is_discarded(), ErrorKind::Format, "index metadata is not valid JSON");
  require(m > 0 && index.dim > 0, ErrorKind::Format, "index header declares an empty matrix");
  require(m <= r.remaining() / 4, ErrorKind::Format, "index id table is truncated");
  std::unordered_set<std::string> seen;
  for (std::uint64_t i = 0; i < m; ++i) {
    index.ids.push_back(r.str());
    require(seen.insert(index.ids.back()).second, ErrorKind::Format, "duplicate id '" + index.ids.back() + "'");
  }
  require(r.remaining() == m * index.dim * 4, ErrorKind::Format, "index matrix size does not match the header");
  index.matrix.resize(m * index.dim);
  r.f32s(index.matrix);
  try {
    compute_norms(index);
  } catch (const Error& e) {
    fail(ErrorKind::Format, std::string("index file: ") + e.what());
  }
  return index;
}

void write_index(const std::filesystem::path& path, const EmbeddingIndex& index) {
  write_file_atomic(path, encode_index(index));
}

EmbeddingIndex read_index(const std::filesystem::path& path) {
  try {
    return decode_index(read_file_bytes(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

double cosine(std::span<const float> a, std::span<const float> b) {
  require(a.size() == b.size(), ErrorKind::Shape, "cosine of vectors with different dims");
  double dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += double(a[i]) * double(b[i]);
  return dot / (norm_of(a) * norm_of(b));
}

QueryResult query(const EmbeddingIndex& index, std::span<const float> z, std::size_t k,
                  std::optional<std::string_view> exclude) {
  require(z.size() == index.dim, ErrorKind::Shape,
          "query has dim " + std::to_string(z.size()) + ", index has dim " + std::to_string(index.dim));
  require(k >= 1 && k <= index.size(), ErrorKind::Contract,
          "k = " + std::to_string(k) + " outside [1, " + std::to_string(index.size()) + "]");
  const double qn = norm_of(z);
  require(qn > 0 && std::isfinite(qn), ErrorKind::Degenerate, "query embedding is zero or non-finite");

  // Float prefilter: |float dot - exact dot| <= n u |a||b| for any summation
  // order, so every true top-k row lies within 2 margins of the k-th estimate.
  const std::size_t m = index.size();
  const double margin = double(index.dim + 8) * 0x1.0p-23;
  std::vector<double> approx(m);
  std::vector<std::size_t> rows;
  rows.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (exclude && index.ids[i] == *exclude) continue;
    const double d = kernels::dot(z.data(), index.matrix.data() + i * index.dim, index.dim);
    approx[i] = std::isfinite(d) ? d / (qn * index.norms[i]) : INFINITY;
    rows.push_back(i);
  }
  if (rows.empty()) return {};
  const std::size_t take = std::min(k, rows.size());
  std::vector<double> scores;
  scores.reserve(rows.size());
  for (std::size_t i : rows) scores.push_back(approx[i]);
  std::nth_element(scores.begin(), scores.begin() + (take - 1), scores.end(), std::greater<>());
  const double threshold = scores[take - 1] - 2 * margin;

  QueryResult hits;
  for (std::size_t i : rows) {
    if (!(approx[i] >= threshold)) continue;
    double dot = 0;
    const float* r = index.matrix.data() + i * index.dim;
    for (std::size_t j = 0; j < index.dim; ++j) dot += double(z[j]) * double(r[j]);
    hits.push_back({index.ids[i], dot / (qn * index.norms[i])});
  }
  std::sort(hits.begin(), hits.end(), ranks_before);
  hits.resize(std::min(hits.size(), take));
  return hits;
}

QueryResult query_part(const EmbeddingIndex& index, std::string_view id, std::size_t k) {
  const auto row = index.find(id);
  require(row.has_value(), ErrorKind::Contract, "part '" + std::string(id) + "' is not in the index");
  return query(index, index.row(*row), k, id);
}

namespace {

int grade_of(const Labels& labels, const std::string& id) {
  const auto it = labels.find(id);
  require(it != labels.end(), ErrorKind::Contract, "returned candidate '" + id + "' has no relevance label");
  return it->second;
}

}  // namespace

double recall_at_k(const QueryResult& result, const Labels& labels, std::size_t k, int min_grade) {
  require(k > 0, ErrorKind::Contract, "recall@k needs k >= 1");
  std::size_t relevant = 0;
  for (const auto& [id, g] : labels) relevant += g >= min_grade;
  std::size_t found = 0;
  for (std::size_t i = 0; i < std::min(k, result.size()); ++i) found += grade_of(labels, result[i].id) >= min_grade;
  if (relevant == 0) return 0;
  return double(found) / double(std::min(k, relevant));
}

double ndcg_at_k(const QueryResult& result, const Labels& labels, std::size_t k) {
  require(k > 0, ErrorKind::Contract, "ndcg@k needs k >= 1");
  auto gain = [](int g) { return std::exp2(double(g)) - 1; };
  double dcg = 0;
  for (std::size_t i = 0; i < std::min(k, result.size()); ++i) {
    dcg += gain(grade_of(labels, result[i].id)) / std::log2(double(i) + 2);
  }
  std::vector<int> pool;
  for (const auto& [id, g] : labels) pool.push_back(g);
  std::sort(pool.begin(), pool.end(), std::greater<>());
  double idcg = 0;
  for (std::size_t i = 0; i < std::min(k, pool.size()); ++i) idcg += gain(pool[i]) / std::log2(double(i) + 2);
  return idcg > 0 ? dcg / idcg : 0;
}

Labels family_labels(const std::map<std::string, std::string>& family, std::string_view query_id) {
  const auto q = family.find(std::string(query_id));
  require(q != family.end(), ErrorKind::Contract, "query part '" + std::string(query_id) + "' has no family label");
  Labels out;
  for (const auto& [id, f] : family) {
    if (id != query_id) out.emplace(id, f == q->second ? Similar : Dissimilar);
  }
  return out;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json per_query = nlohmann::json::array();
  for (std::size_t q = 0; q < queries.size(); ++q) {
    nlohmann::json j = {{"query", queries[q]}};
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const std::string k = std::to_string(ks[i]);
      j["recall@" + k] = recall[q][i];
      j["recall_partial@" + k] = recall_partial[q][i];
      j["ndcg@" + k] = ndcg[q][i];
    }
    per_query.push_back(j);
  }
  nlohmann::json mean = nlohmann::json::object();
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const std::string k = std::to_string(ks[i]);
    mean["recall@" + k] = mean_recall[i];
    mean["recall_partial@" + k] = mean_recall_partial[i];
    mean["ndcg@" + k] = mean_ndcg[i];
  }
  return {{"queries", queries.size()}, {"mean", mean}, {"per_query", per_query}};
}

EvalReport evaluate(const EmbeddingIndex& index, const std::vector<std::size_t>& ks,
                    const std::vector<std::string>& queries,
                    const std::function<Labels(const std::string&)>& labels_for) {
  require(!ks.empty(), ErrorKind::Contract, "evaluation needs at least one k");
  require(index.size() >= 2, ErrorKind::Contract, "evaluation needs at least 2 indexed parts");
  EvalReport rep;
  rep.ks = ks;
  rep.queries = queries;
  const std::size_t kmax = std::min(*std::max_element(ks.begin(), ks.end()), index.size() - 1);
  rep.mean_recall.assign(ks.size(), 0);
  rep.mean_recall_partial.assign(ks.size(), 0);
  rep.mean_ndcg.assign(ks.size(), 0);
  for (const std::string& q : queries) {
    const QueryResult result = query_part(index, q, kmax);
    const Labels labels = labels_for(q);
    std::vector<double> r, rp, n;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      r.push_back(recall_at_k(result, labels, ks[i], Similar));
      rp.push_back(recall_at_k(result, labels, ks[i], Partial));
      n.push_back(ndcg_at_k(result, labels, ks[i]));
      rep.mean_recall[i] += r.back();
      rep.mean_recall_partial[i] += rp.back();
      rep.mean_ndcg[i] += n.back();
    }
    rep.recall.push_back(std::move(r));
    rep.recall_partial.push_back(std::move(rp));
    rep.ndcg.push_back(std::move(n));
  }
  const double count = queries.empty() ? 1.0 : double(queries.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    rep.mean_recall[i] /= count;
    rep.mean_recall_partial[i] /= count;
    rep.mean_ndcg[i] /= count;
  }
  return rep;
}

EvalReport evaluate_families(const EmbeddingIndex& index, const std::map<std::string, std::string>& family,
                             const std::vector<std::size_t>& ks) {
  std::map<std::string, std::string> indexed;
  for (const std::string& id : index.ids) {
    const auto it = family.find(id);
    require(it != family.end(), ErrorKind::Contract, "indexed part '" + id + "' has no family label");
    indexed.emplace(id, it->second);
  }
  return evaluate(index, ks, index.ids, [&](const std::string& q) { return family_labels(indexed, q); });
}

std::vector<AssemblyHit> assembly_query(const AssemblyRecord& query, const EmbeddingIndex& index,
                                        const std::vector<AssemblyRecord>& database, std::size_t k_parts,
                                        std::size_t k_out) {
  require(!query.parts.empty(), ErrorKind::Contract, "query assembly '" + query.id + "' has no parts");
  require(k_parts >= 1, ErrorKind::Contract, "k_parts must be at least 1");
  std::vector<std::size_t> rows;
  for (const std::string& p : query.parts) {
    const auto row = index.find(p);
    require(row.has_value(), ErrorKind::Contract,
            "part '" + p + "' of assembly '" + query.id + "' is not in the index");
    rows.push_back(*row);
  }
  std::unordered_map<std::string, std::vector<std::size_t>> containing;  // part -> database positions
  for (std::size_t a = 0; a < database.size(); ++a) {
    const std::set<std::string> unique(database[a].parts.begin(), database[a].parts.end());
    for (const std::string& p : unique) containing[p].push_back(a);
  }
  std::vector<std::size_t> votes(database.size(), 0);
  const std::size_t k = std::min(k_parts, index.size());
  for (std::size_t row : rows) {
    for (const Hit& h : retrieval::query(index, index.row(row), k)) {
      const auto it = containing.find(h.id);
      if (it == containing.end()) continue;
      for (std::size_t a : it->second) ++votes[a];
    }
  }
  std::vector<AssemblyHit> out;
  for (std::size_t a = 0; a < database.size(); ++a) {
    if (votes[a] > 0 && database[a].id != query.id) out.push_back({database[a].id, votes[a]});
  }
  std::sort(out.begin(), out.end(), [](const AssemblyHit& x, const AssemblyHit& y) {
    return x.votes != y.votes ? x.votes > y.votes : x.id < y.id;
  });
  if (out.size() > k_out) out.resize(k_out);
  return out;
}

std::vector<AssemblyRecord> read_assemblies(const std::filesystem::path& path) {
  const std::string text = read_file_text(path);
  std::vector<AssemblyRecord> out;
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path.string() + ":" + std::to_string(line_no);
    const nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    require(!j.is_discarded(), ErrorKind::Format, where + ": invalid JSON");
    try {
      AssemblyRecord rec{j.at("id").get<std::string>(), j.at("parts").get<std::vector<std::string>>()};
      require(!rec.parts.empty(), ErrorKind::Format, where + ": assembly '" + rec.id + "' has no parts");
      out.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Format, where + ": " + e.what());
    }
  }
  return out;
}

void write_assemblies(const std::filesystem::path& path, const std::vector<AssemblyRecord>& records) {
  std::string text;
  for (const AssemblyRecord& r : records) text += nlohmann::json{{"id", r.id}, {"parts", r.parts}}.dump() + "\n";
  write_file_atomic(path, text);
}

}  // namespace cadret::retrieval
