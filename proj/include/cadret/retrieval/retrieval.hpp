#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace cadret::retrieval {

inline constexpr std::uint8_t kIndexVersion = 1;

// Exact cosine index over part embeddings. Rows keep insertion order.
struct EmbeddingIndex {
  std::vector<std::string> ids;
  std::size_t dim = 0;
  std::vector<float> matrix;   // [M, dim], row-major
  std::vector<double> norms;   // l2 norm per row, sequential double sum
  nlohmann::json meta = nlohmann::json::object();

  std::size_t size() const noexcept { return ids.size(); }
  std::span<const float> row(std::size_t i) const { return {matrix.data() + i * dim, dim}; }
  std::optional<std::size_t> find(std::string_view id) const;
};

// Throws Error(Contract) for no embeddings or duplicate ids, Error(Shape) for
// mixed dims, Error(Degenerate) naming the part for a zero or non-finite vector.
EmbeddingIndex build_index(const std::vector<std::pair<std::string, std::vector<float>>>& embeddings,
                           nlohmann::json meta = nlohmann::json::object());

std::vector<std::uint8_t> encode_index(const EmbeddingIndex& index);
EmbeddingIndex decode_index(std::span<const std::uint8_t> bytes);
void write_index(const std::filesystem::path& path, const EmbeddingIndex& index);
EmbeddingIndex read_index(const std::filesystem::path& path);

struct Hit {
  std::string id;
  double score = 0;
  bool operator==(const Hit&) const = default;
};
using QueryResult = std::vector<Hit>;

// cos(a, b) = (sum_i a_i b_i) / (|a| |b|) with sequential double sums.
double cosine(std::span<const float> a, std::span<const float> b);

// Exact top-k by cosine, ties by ascending id; `exclude` is never returned.
// Throws Error(Shape) on a dim mismatch, Error(Contract) unless 1 <= k <= M,
// Error(Degenerate) for a zero query.
QueryResult query(const EmbeddingIndex& index, std::span<const float> z, std::size_t k,
                  std::optional<std::string_view> exclude = std::nullopt);

// Top-k neighbours of a stored part, excluding the part itself.
QueryResult query_part(const EmbeddingIndex& index, std::string_view id, std::size_t k);

enum Grade : int { Dissimilar = 0, Partial = 1, Similar = 2 };

// Candidate id -> grade for one query.
using Labels = std::map<std::string, int, std::less<>>;

// |top-k with grade >= min_grade| / min(k, |pool with grade >= min_grade|);
// 0 when the pool has none. Throws Error(Contract) for k == 0 or a returned
// candidate without a label.
double recall_at_k(const QueryResult& result, const Labels& labels, std::size_t k, int min_grade = Similar);

// DCG@k / IDCG@k with gain 2^g - 1 and discount log2(i + 1); IDCG from the
// whole labeled pool; 0 when IDCG = 0.
double ndcg_at_k(const QueryResult& result, const Labels& labels, std::size_t k);

// Similar for same family, dissimilar otherwise, over every other part.
Labels family_labels(const std::map<std::string, std::string>& family, std::string_view query_id);

struct EvalReport {
  std::vector<std::size_t> ks;
  std::vector<std::string> queries;
  // [query][k index]
  std::vector<std::vector<double>> recall, recall_partial, ndcg;
  std::vector<double> mean_recall, mean_recall_partial, mean_ndcg;

  nlohmann::json to_json() const;
};

// Every labeled part of the index queries the rest; `labels_for` gives its
// relevance pool.
EvalReport evaluate(const EmbeddingIndex& index, const std::vector<std::size_t>& ks,
                    const std::vector<std::string>& queries,
                    const std::function<Labels(const std::string&)>& labels_for);
EvalReport evaluate_families(const EmbeddingIndex& index, const std::map<std::string, std::string>& family,
                             const std::vector<std::size_t>& ks);

struct AssemblyRecord {
  std::string id;
  std::vector<std::string> parts;
};

struct AssemblyHit {
  std::string id;
  std::size_t votes = 0;
  bool operator==(const AssemblyHit&) const = default;
};

// Each query member retrieves its top k_parts parts (itself included); every
// retrieved part votes once for each assembly containing it. Assemblies rank
// by votes descending, then ascending id; the query assembly and zero-vote
// assemblies are left out. Throws Error(Contract) naming a member part that is
// missing from the index.
std::vector<AssemblyHit> assembly_query(const AssemblyRecord& query, const EmbeddingIndex& index,
                                        const std::vector<AssemblyRecord>& database, std::size_t k_parts,
                                        std::size_t k_out);

std::vector<AssemblyRecord> read_assemblies(const std::filesystem::path& path);
void write_assemblies(const std::filesystem::path& path, const std::vector<AssemblyRecord>& records);

}  // namespace cadret::retrieval
