#pragma once

#include <chrono>
#include <istream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sarena::categorize {

class CategoryError : public std::runtime_error {
 public:
  enum class Kind { DimensionMismatch, EmptySeedSet, InvalidK, UnknownCategory, ZeroVector };
  CategoryError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct SeedPrompt {
  std::string text;
  std::string category;
  std::vector<float> embedding;
};

class CategoryIndex {
 public:
  const Eigen::MatrixXf& rows() const { return rows_; }  // unit-norm, one per seed
  const std::vector<std::string>& labels() const { return labels_; }
  int k() const { return k_; }
  int dimension() const { return static_cast<int>(rows_.cols()); }
  std::size_t size() const { return labels_.size(); }

 private:
  friend CategoryIndex build_index(const std::vector<SeedPrompt>&, int);
  Eigen::MatrixXf rows_;
  std::vector<std::string> labels_;
  int k_ = 1;
};

// Throws EmptySeedSet, InvalidK, DimensionMismatch, UnknownCategory or ZeroVector.
CategoryIndex build_index(const std::vector<SeedPrompt>& seeds, int k = 5);

struct Neighbor {
  std::size_t seed = 0;
  std::string category;
  double similarity = 0;
};

struct Classification {
  std::string category;
  std::map<std::string, int> votes;
  std::vector<Neighbor> neighbors;  // nearest first
};

// Majority of the k most similar seeds; ties go to the label of the single
// nearest neighbor.
Classification classify(const CategoryIndex& index, const std::vector<float>& embedding);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<float> embed(const std::string& text) = 0;
};

// Offline provider: signed feature hashing of character trigrams and words.
class HashingEmbedder : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(int dimension = 512) : dimension_(dimension) {}
  std::vector<float> embed(const std::string& text) override;

 private:
  int dimension_;
};

struct HttpEmbedderConfig {
  std::string endpoint;      // full URL of an embeddings endpoint
  std::string model;
  std::string api_key_env;   // name of the variable holding the key, may be empty
  std::chrono::milliseconds timeout{30000};
};

// Speaks the common {"model","input"} -> {"data":[{"embedding":[...]}]} shape.
class HttpEmbedder : public EmbeddingProvider {
 public:
  explicit HttpEmbedder(HttpEmbedderConfig config) : config_(std::move(config)) {}
  std::vector<float> embed(const std::string& text) override;

 private:
  HttpEmbedderConfig config_;
};

// JSONL of {text, category, embedding?}. Rows without an embedding are
// embedded with `provider`, which may be null only if every row has one.
std::vector<SeedPrompt> read_seeds_jsonl(std::istream& in, EmbeddingProvider* provider);

}  // namespace sarena::categorize
