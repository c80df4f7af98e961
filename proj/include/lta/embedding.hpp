#pragma once

#include <cctype>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lta/rng.hpp"

namespace lta {

// Text-to-vector interface. Implementations must be deterministic, keep a
// constant output dimension and be safe for concurrent embed calls.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<double> embed(std::string_view text) const = 0;
  virtual std::size_t dimension() const = 0;
};

// Cosine similarity, defined as 0 when either vector has zero norm.
inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("cosine_similarity: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double sim = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::min(1.0, std::max(-1.0, sim));
}

// Deterministic bag-of-words stand-in for a sentence encoder: lowercase,
// split on non-alphanumerics, hash each token into one of 256 buckets with
// unit increments, then L2-normalize. Empty text embeds to the zero vector.
class HashedBagOfWordsEmbedder final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDimension = 256;

  std::vector<double> embed(std::string_view text) const override {
    std::vector<double> vec(kDimension, 0.0);
    std::string token;
    double norm_sq = 0.0;
    auto flush = [&] {
      if (token.empty()) return;
      const std::size_t bucket = fnv1a64(token) % kDimension;
      norm_sq += 2.0 * vec[bucket] + 1.0;  // incremental |v|^2 update
      vec[bucket] += 1.0;
      token.clear();
    };
    for (unsigned char c : text) {
      if (std::isalnum(c)) {
        token.push_back(static_cast<char>(std::tolower(c)));
      } else {
        flush();
      }
    }
    flush();
    if (norm_sq > 0.0) {
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (double& x : vec) x *= inv;
    }
    return vec;
  }

  std::size_t dimension() const override { return kDimension; }
};

inline const EmbeddingProvider& reference_embedder() {
  static const HashedBagOfWordsEmbedder instance;
  return instance;
}

}  // namespace lta
