#include "primnav/perception/embedding.hpp"

#include <cmath>

namespace primnav::perception {

double EmbeddingVector::dot(const EmbeddingVector& o) const {
  double s = 0.0;
  for (std::size_t i = 0; i < components.size() && i < o.components.size(); ++i)
    s += components[i] * o.components[i];
  return s;
}

double EmbeddingVector::norm() const { return std::sqrt(dot(*this)); }

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

Embedder::Embedder(int dim) : dim_(dim) {
  if (dim <= 0) throw ValidationError("embedding dimension must be positive");
}

const std::vector<double>& Embedder::token_vector(const std::string& token) const {
  auto it = cache_.find(token);
  if (it != cache_.end()) return it->second;
  Rng rng(fnv1a64(token));
  std::vector<double> v(static_cast<std::size_t>(dim_));
  for (auto& x : v) x = rng.normal();
  return cache_.emplace(token, std::move(v)).first->second;
}

EmbeddingVector Embedder::embed_tokens(const std::vector<std::string>& tokens) const {
  if (tokens.empty()) throw ValidationError("cannot embed an empty token set");
  EmbeddingVector out{std::vector<double>(static_cast<std::size_t>(dim_), 0.0)};
  for (const auto& t : tokens) {
    const auto& v = token_vector(t);
    for (std::size_t i = 0; i < v.size(); ++i) out.components[i] += v[i];
  }
  double n = out.norm();
  if (n == 0.0) throw ValidationError("degenerate embedding");
  for (auto& x : out.components) x /= n;
  return out;
}

EmbeddingVector Embedder::embed_text(std::string_view text) const {
  return embed_tokens(tokenize(text));
}

EmbeddingVector Embedder::embed_image(const gridworld::Scene& scene, std::string_view image_ref) const {
  const auto* o = scene.find_by_image(image_ref);
  if (!o) throw LookupError("unknown image_ref '" + std::string(image_ref) + "'");
  return embed_text(object_text(*o));
}

std::string object_text(const gridworld::SceneObject& object) {
  std::string s = object.category;
  if (!object.subcategory.empty() && object.subcategory != object.category) s += " " + object.subcategory;
  for (const auto& [key, value] : object.attributes) {
    if (key == "room") continue;
    s += " " + value;
  }
  return s;
}

}  // namespace primnav::perception
