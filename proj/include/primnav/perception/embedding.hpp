#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "primnav/gridworld/scene.hpp"

namespace primnav::perception {

inline constexpr int kDefaultEmbeddingDim = 64;

// Unit-norm feature vector.
struct EmbeddingVector {
  std::vector<double> components;

  std::size_t dim() const { return components.size(); }
  bool empty() const { return components.empty(); }
  double dot(const EmbeddingVector& o) const;
  double norm() const;
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

// Hashed-token Gaussian embeddings: each token maps to a Gaussian vector seeded by its
// FNV-1a hash, and a text embeds as the normalized sum of its token vectors. Related
// texts (shared tokens) therefore score a higher cosine than unrelated ones.
class Embedder {
 public:
  explicit Embedder(int dim = kDefaultEmbeddingDim);

  int dim() const { return dim_; }

  // Raw (unnormalized) Gaussian vector for one token.
  const std::vector<double>& token_vector(const std::string& token) const;

  // Throws ValidationError when the text has no tokens.
  EmbeddingVector embed_text(std::string_view text) const;
  EmbeddingVector embed_tokens(const std::vector<std::string>& tokens) const;
  // An image reference embeds as its object's category and attribute tokens.
  EmbeddingVector embed_image(const gridworld::Scene& scene, std::string_view image_ref) const;

 private:
  int dim_;
  mutable std::unordered_map<std::string, std::vector<double>> cache_;
};

// Category, subcategory, then appearance attribute values (sorted by key). The "room"
// attribute is location metadata and is left out.
std::string object_text(const gridworld::SceneObject& object);

double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace primnav::perception
