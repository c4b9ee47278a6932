#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "primnav/perception/embedding.hpp"
#include "primnav/perception/oracle.hpp"
#include "primnav/pointnav/pointnav.hpp"

namespace primnav::interp {

enum class ValueKind { kText, kNumber, kBoolean, kPoint, kDetections, kEmbedding, kAnswer, kNavOutcome };

std::string to_string(ValueKind k);
ValueKind value_kind_from_string(std::string_view s);

struct Text {
  std::string value;
  friend bool operator==(const Text&, const Text&) = default;
};

// Answer text is kept distinct from plain text so traces show where answers came from.
struct Answer {
  std::string value;
  friend bool operator==(const Answer&, const Answer&) = default;
};

using Detections = std::vector<perception::Detection>;

class Value {
 public:
  using Storage = std::variant<Text, double, bool, Point, Detections, perception::EmbeddingVector, Answer,
                               pointnav::NavOutcome>;

  Value() : v_(Text{}) {}
  Value(Text t) : v_(std::move(t)) {}
  Value(double d) : v_(d) {}
  Value(bool b) : v_(b) {}
  Value(Point p) : v_(p) {}
  Value(Detections d) : v_(std::move(d)) {}
  Value(perception::EmbeddingVector e) : v_(std::move(e)) {}
  Value(Answer a) : v_(std::move(a)) {}
  Value(pointnav::NavOutcome n) : v_(n) {}

  ValueKind kind() const { return static_cast<ValueKind>(v_.index()); }
  const Storage& storage() const { return v_; }

  const std::string& text() const;  // text or answer
  double number() const;
  bool boolean() const;
  const Point& point() const;
  const Detections& detections() const;
  const perception::EmbeddingVector& embedding() const;
  const pointnav::NavOutcome& nav() const;

  // Truthiness used by is_found: non-empty detections, reached outcome, true boolean,
  // non-zero number, non-empty text.
  bool truthy() const;
  // Short human-readable form for trace listings.
  std::string summary() const;

  friend bool operator==(const Value&, const Value&) = default;

 private:
  Storage v_;
};

nlohmann::json to_json(const Value& v);
Value value_from_json(const nlohmann::json& j);

}  // namespace primnav::interp
