#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace primnav::perception {

struct SynonymGroup {
  std::string canonical;
  std::vector<std::string> synonyms;
};

// Groups of equivalent answers/labels ("off-white" -> "white"). Loaded from a JSON
// array of {canonical, synonyms[]}.
class SynonymTable {
 public:
  SynonymTable() = default;
  explicit SynonymTable(std::vector<SynonymGroup> groups);

  static SynonymTable parse(const std::string& json_text);
  static SynonymTable load(const std::filesystem::path& path);

  const std::vector<SynonymGroup>& groups() const { return groups_; }

  // Lowercased tokens with every synonym phrase (longest first) replaced by its
  // canonical tokens.
  std::vector<std::string> canonical_tokens(std::string_view text) const;
  // Canonical names and synonyms of the group containing `label`, or just `label`.
  std::vector<std::string> expand(std::string_view label) const;

 private:
  struct Phrase {
    std::vector<std::string> tokens;
    std::vector<std::string> canonical;
  };
  std::vector<SynonymGroup> groups_;
  std::vector<Phrase> phrases_;  // sorted by descending length
};

}  // namespace primnav::perception
