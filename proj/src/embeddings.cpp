#include "discoscore/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <semaphore>
#include <sstream>
#include <thread>

#include "httplib.h"

#include "discoscore/error.hpp"

namespace discoscore {

using nlohmann::json;

EmbeddingMatrix::EmbeddingMatrix(Matrix rows) : rows_(std::move(rows)) {
  if (rows_.cols() == 0) throw DomainError("embedding dimension must be positive");
  if (!rows_.allFinite()) throw DomainError("embedding contains non-finite values");
}

bool EmbeddingMatrix::operator==(const EmbeddingMatrix& other) const {
  return rows_.rows() == other.rows_.rows() && rows_.cols() == other.rows_.cols() &&
         rows_ == other.rows_;
}

DocKey hypothesis_key(const RatedInstance& instance) {
  return {instance.doc_id, DocKind::Hypothesis, instance.system_id, 0};
}

DocKey reference_key(const RatedInstance& instance, std::size_t ref_index) {
  return {instance.doc_id, DocKind::Reference, "", ref_index};
}

std::string to_string(const DocKey& key) {
  std::string out = std::string(to_string(key.kind)) + " doc_id=" + key.doc_id;
  if (key.kind == DocKind::Hypothesis) {
    out += " system_id=" + key.system_id;
  } else {
    out += " ref_index=" + std::to_string(key.ref_index);
  }
  return out;
}

namespace detail {

Matrix parse_float32_rows(const json& rows, std::size_t dim) {
  if (!rows.is_array()) throw ParseError("vectors must be an array of arrays");
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const json& row = rows[r];
    if (!row.is_array()) throw ParseError("vector " + std::to_string(r) + " is not an array");
    if (row.size() != dim) {
      throw ShapeError("vector " + std::to_string(r) + " has " + std::to_string(row.size()) +
                       " components, expected " + std::to_string(dim));
    }
    for (std::size_t c = 0; c < dim; ++c) {
      if (!row[c].is_number()) throw ParseError("non-numeric vector component");
      const float value = row[c].get<float>();
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = static_cast<double>(value);
    }
  }
  return out;
}

}  // namespace detail

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

DocKey parse_key(const json& rec, std::size_t line) {
  DocKey key;
  auto str = [&](const char* field, bool required) -> std::string {
    auto it = rec.find(field);
    if (it == rec.end() || it->is_null()) {
      if (required) throw ParseError(std::string("missing required field '") + field + "'", line);
      return {};
    }
    if (!it->is_string()) throw ParseError(std::string("field '") + field + "' must be a string", line);
    return it->get<std::string>();
  };
  key.doc_id = str("doc_id", true);
  const std::string kind = str("kind", true);
  if (kind == "hypothesis") {
    key.kind = DocKind::Hypothesis;
    key.system_id = str("system_id", true);
  } else if (kind == "reference") {
    key.kind = DocKind::Reference;
    auto it = rec.find("ref_index");
    if (it != rec.end()) {
      if (!it->is_number_unsigned()) throw ParseError("field 'ref_index' must be a non-negative integer", line);
      key.ref_index = it->get<std::size_t>();
    }
  } else {
    throw ParseError("field 'kind' must be 'hypothesis' or 'reference'", line);
  }
  return key;
}

// Shared reader for token and sentence records. `field` selects which
// matrix the record carries; `count_field` is the declared row count.
EmbeddingTable parse_records(std::string_view ndjson, const char* field, const char* count_field) {
  EmbeddingTable table;
  std::optional<std::size_t> file_dim;
  std::istringstream in{std::string(ndjson)};
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line);
    }
    if (!rec.is_object()) throw ParseError("expected a JSON object", line);
    if (rec.value("skipped", false)) continue;
    auto vectors = rec.find(field);
    if (vectors == rec.end()) continue;

    DocKey key = parse_key(rec, line);
    auto dim_it = rec.find("dim");
    if (dim_it == rec.end()) throw ParseError("missing required field 'dim'", line);
    if (!dim_it->is_number_unsigned() || dim_it->get<std::size_t>() == 0) {
      throw ParseError("field 'dim' must be a positive integer", line);
    }
    const std::size_t dim = dim_it->get<std::size_t>();
    if (file_dim && *file_dim != dim) {
      throw ShapeError("line " + std::to_string(line) + ": dimension mismatch: dim " +
                       std::to_string(dim) + " after records of dim " + std::to_string(*file_dim));
    }
    file_dim = dim;

    Matrix rows;
    try {
      rows = detail::parse_float32_rows(*vectors, dim);
    } catch (const ShapeError& e) {
      throw ShapeError("line " + std::to_string(line) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line);
    }
    if (count_field != nullptr) {
      auto count = rec.find(count_field);
      if (count == rec.end()) throw ParseError(std::string("missing required field '") + count_field + "'", line);
      if (!count->is_number_unsigned()) {
        throw ParseError(std::string("field '") + count_field + "' must be a non-negative integer", line);
      }
      if (count->get<std::size_t>() != static_cast<std::size_t>(rows.rows())) {
        throw ShapeError("line " + std::to_string(line) + ": row count " +
                         std::to_string(rows.rows()) + " does not match " + count_field + " " +
                         std::to_string(count->get<std::size_t>()));
      }
    }
    EmbeddingMatrix matrix;
    try {
      matrix = EmbeddingMatrix(std::move(rows));
    } catch (const DomainError& e) {
      throw ParseError(e.what(), line);
    }
    if (!table.emplace(key, std::move(matrix)).second) {
      throw ParseError("duplicate record for " + to_string(key), line);
    }
  }
  return table;
}

}  // namespace

EmbeddingTable parse_embedding_records(std::string_view ndjson) {
  return parse_records(ndjson, "vectors", "token_count");
}

EmbeddingTable load_embedding_file(const std::string& path) {
  return parse_embedding_records(read_file(path));
}

EmbeddingTable parse_sentence_vector_records(std::string_view ndjson) {
  return parse_records(ndjson, "sentence_vectors", nullptr);
}

EmbeddingTable load_sentence_vector_file(const std::string& path) {
  return parse_sentence_vector_records(read_file(path));
}

// ---------------------------------------------------------------------------
// HTTP service backend

struct EmbeddingClient::Limiter {
  explicit Limiter(int n) : slots(std::max(1, n)) {}
  std::counting_semaphore<> slots;
};

EmbeddingClient::EmbeddingClient(std::string url, ServiceOptions options)
    : url_(std::move(url)), options_(options), limiter_(std::make_unique<Limiter>(options.max_in_flight)) {
  while (!url_.empty() && url_.back() == '/') url_.pop_back();
}

EmbeddingClient::~EmbeddingClient() = default;

EmbeddingMatrix EmbeddingClient::fetch(const AnnotatedDocument& doc) const {
  json tokens = json::array();
  for (const auto& t : doc.tokens()) tokens.push_back(t.surface);
  const std::string body = json{{"tokens", std::move(tokens)}}.dump();

  std::string last_failure;
  const int attempts = 1 + std::max(0, options_.retries);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options_.backoff * attempt);

    limiter_->slots.acquire();
    httplib::Result res = [&] {
      httplib::Client client(url_);
      const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
      const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
      client.set_connection_timeout(secs.count(), usecs.count());
      client.set_read_timeout(secs.count(), usecs.count());
      return client.Post("/embed", body, "application/json");
    }();
    limiter_->slots.release();

    if (!res) {
      last_failure = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    json reply;
    try {
      reply = json::parse(res->body);
    } catch (const json::parse_error&) {
      throw ProtocolError("embedding service returned invalid JSON (HTTP " +
                          std::to_string(res->status) + ")");
    }
    if (res->status != 200) {
      std::string message = reply.is_object() ? reply.value("error", std::string("no message")) : "no message";
      throw ProtocolError("embedding service error (HTTP " + std::to_string(res->status) + "): " + message);
    }
    if (!reply.is_object() || !reply.contains("dim") || !reply.contains("vectors") ||
        !reply["dim"].is_number_unsigned()) {
      throw ProtocolError("embedding service reply lacks 'dim' or 'vectors'");
    }
    const std::size_t dim = reply["dim"].get<std::size_t>();
    if (reply["vectors"].size() != doc.token_count()) {
      throw ProtocolError("embedding service returned " + std::to_string(reply["vectors"].size()) +
                          " vectors for " + std::to_string(doc.token_count()) + " tokens");
    }
    try {
      return EmbeddingMatrix(detail::parse_float32_rows(reply["vectors"], dim));
    } catch (const Error& e) {
      throw ProtocolError(std::string("embedding service reply: ") + e.what());
    }
  }
  throw TransportError("embedding service " + url_ + " unreachable after " +
                       std::to_string(attempts) + " attempts: " + last_failure);
}

EmbeddingMatrix fetch_embeddings(const std::string& service_url, const AnnotatedDocument& doc,
                                 const ServiceOptions& options) {
  return EmbeddingClient(service_url, options).fetch(doc);
}

// ---------------------------------------------------------------------------
// Static lexicon

bool StaticLexicon::add(const std::string& word, Vector vec) {
  if (dim_ == 0) dim_ = static_cast<std::size_t>(vec.size());
  if (static_cast<std::size_t>(vec.size()) != dim_) {
    throw ShapeError("vector for '" + word + "' has dimension " + std::to_string(vec.size()) +
                     ", expected " + std::to_string(dim_));
  }
  if (!(vec.norm() > 0.0)) throw DomainError("zero-norm vector for '" + word + "'");
  auto [it, inserted] = entries_.insert_or_assign(word, std::move(vec));
  return !inserted;
}

const Vector* StaticLexicon::find(const std::string& word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

StaticLexicon parse_static_lexicon(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty lexicon file", 1);
  std::size_t count = 0;
  std::size_t dim = 0;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> count >> dim) || (header >> extra) || dim == 0) {
      throw ParseError("header must be \"count dim\"", 1);
    }
  }
  StaticLexicon lexicon(dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    Vector vec(static_cast<Eigen::Index>(dim));
    std::size_t n = 0;
    std::string component;
    while (fields >> component) {
      if (n == dim) throw ParseError("more than " + std::to_string(dim) + " components", line_no);
      double value = 0.0;
      try {
        std::size_t used = 0;
        value = std::stod(component, &used);
        if (used != component.size()) throw std::invalid_argument(component);
      } catch (const std::exception&) {
        throw ParseError("non-numeric vector component '" + component + "'", line_no);
      }
      if (!std::isfinite(value)) throw ParseError("non-finite vector component", line_no);
      vec(static_cast<Eigen::Index>(n++)) = value;
    }
    if (n != dim) {
      throw ParseError("expected " + std::to_string(dim) + " components, got " + std::to_string(n), line_no);
    }
    if (!(vec.norm() > 0.0)) {
      lexicon.warn("line " + std::to_string(line_no) + ": zero-norm vector for '" + word + "' skipped");
      continue;
    }
    if (lexicon.add(word, std::move(vec))) {
      lexicon.warn("line " + std::to_string(line_no) + ": duplicate word '" + word + "', last entry kept");
    }
  }
  if (lexicon.size() != count && lexicon.warnings().empty()) {
    lexicon.warn("header declares " + std::to_string(count) + " entries, read " + std::to_string(lexicon.size()));
  }
  return lexicon;
}

StaticLexicon load_static_lexicon(const std::string& path) {
  return parse_static_lexicon(read_file(path));
}

double cosine(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) {
    throw ShapeError("cosine of vectors with dimensions " + std::to_string(u.size()) + " and " +
                     std::to_string(v.size()));
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 0.0) || !(nv > 0.0)) throw DomainError("cosine of a zero-norm vector");
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

}  // namespace discoscore
