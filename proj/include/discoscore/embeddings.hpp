#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "discoscore/corpus.hpp"

namespace discoscore {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Contextual token embeddings of one document, one row per token.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  // Throws DomainError on non-finite entries or a zero dimension.
  explicit EmbeddingMatrix(Matrix rows);

  std::size_t rows() const { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(rows_.cols()); }
  const Matrix& matrix() const { return rows_; }
  auto row(std::size_t i) const { return rows_.row(static_cast<Eigen::Index>(i)); }

  bool operator==(const EmbeddingMatrix& other) const;

 private:
  Matrix rows_;
};

// Identifies a document inside an embedding file. References carry no
// system id; ref_index distinguishes multiple references of one doc_id.
struct DocKey {
  std::string doc_id;
  DocKind kind = DocKind::Hypothesis;
  std::string system_id;
  std::size_t ref_index = 0;

  auto operator<=>(const DocKey&) const = default;
  bool operator==(const DocKey&) const = default;
};

DocKey hypothesis_key(const RatedInstance& instance);
DocKey reference_key(const RatedInstance& instance, std::size_t ref_index);
std::string to_string(const DocKey& key);

using EmbeddingTable = std::map<DocKey, EmbeddingMatrix>;

// Token embedding records ({"doc_id","kind","system_id","dim","token_count",
// "vectors"}). Records without "vectors", or flagged "skipped", are ignored.
EmbeddingTable load_embedding_file(const std::string& path);
EmbeddingTable parse_embedding_records(std::string_view ndjson);

// Per-sentence vectors ({..., "sentence_vectors"}), keyed like token records.
EmbeddingTable load_sentence_vector_file(const std::string& path);
EmbeddingTable parse_sentence_vector_records(std::string_view ndjson);

namespace detail {
// Reads `rows` as float32 values widened to double. Throws ShapeError when
// a row has the wrong length and ParseError on non-numeric entries.
Matrix parse_float32_rows(const nlohmann::json& rows, std::size_t dim);
}  // namespace detail

// Client for the POST /embed service. Safe to share between threads; at
// most `max_in_flight` requests are outstanding at any time.
struct ServiceOptions {
  int retries = 3;
  std::chrono::milliseconds timeout{30000};
  std::chrono::milliseconds backoff{50};
  int max_in_flight = 4;
};

class EmbeddingClient {
 public:
  explicit EmbeddingClient(std::string url, ServiceOptions options = {});
  ~EmbeddingClient();
  EmbeddingClient(const EmbeddingClient&) = delete;
  EmbeddingClient& operator=(const EmbeddingClient&) = delete;

  // Throws TransportError after retries are exhausted, ProtocolError when
  // the response does not carry one vector per token.
  EmbeddingMatrix fetch(const AnnotatedDocument& doc) const;

  const std::string& url() const { return url_; }

 private:
  struct Limiter;
  std::string url_;
  ServiceOptions options_;
  std::unique_ptr<Limiter> limiter_;
};

EmbeddingMatrix fetch_embeddings(const std::string& service_url, const AnnotatedDocument& doc,
                                 const ServiceOptions& options = {});

// Static word vectors (word2vec text format).
class StaticLexicon {
 public:
  explicit StaticLexicon(std::size_t dim = 0) : dim_(dim) {}

  // Inserts or replaces; returns true when an entry was replaced. Throws
  // ShapeError on a dimension mismatch, DomainError on a zero-norm vector.
  bool add(const std::string& word, Vector vec);

  // Null when the word is absent.
  const Vector* find(const std::string& word) const;
  bool contains(const std::string& word) const { return find(word) != nullptr; }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<std::string>& warnings() const { return warnings_; }
  void warn(std::string message) { warnings_.push_back(std::move(message)); }

 private:
  std::size_t dim_;
  std::unordered_map<std::string, Vector> entries_;
  std::vector<std::string> warnings_;
};

StaticLexicon load_static_lexicon(const std::string& path);
StaticLexicon parse_static_lexicon(std::string_view text);

// Cosine similarity, clamped to [-1, 1]. Throws ShapeError on unequal
// dimensions and DomainError on a zero-norm argument.
double cosine(const Vector& u, const Vector& v);

}  // namespace discoscore
