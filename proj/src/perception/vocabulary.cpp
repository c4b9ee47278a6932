#include "primnav/perception/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "primnav/common.hpp"

namespace primnav::perception {

SynonymTable::SynonymTable(std::vector<SynonymGroup> groups) : groups_(std::move(groups)) {
  for (const auto& g : groups_) {
    auto canon = tokenize(g.canonical);
    if (canon.empty()) throw ValidationError("synonym group with empty canonical name");
    phrases_.push_back({canon, canon});
    for (const auto& s : g.synonyms) {
      auto toks = tokenize(s);
      if (!toks.empty()) phrases_.push_back({std::move(toks), canon});
    }
  }
  std::stable_sort(phrases_.begin(), phrases_.end(),
                   [](const Phrase& a, const Phrase& b) { return a.tokens.size() > b.tokens.size(); });
}

SynonymTable SynonymTable::parse(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("synonym table: ") + e.what());
  }
  if (!doc.is_array()) throw FormatError("synonym table: expected an array");
  std::vector<SynonymGroup> groups;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("canonical"))
      throw FormatError("synonym table: each entry needs a 'canonical' field");
    for (const auto& [key, _] : item.items())
      if (key != "canonical" && key != "synonyms")
        throw FormatError("synonym table: unknown field '" + key + "'");
    SynonymGroup g;
    try {
      g.canonical = item.at("canonical").get<std::string>();
      if (item.contains("synonyms")) g.synonyms = item.at("synonyms").get<std::vector<std::string>>();
    } catch (const nlohmann::json::type_error& e) {
      throw FormatError(std::string("synonym table: ") + e.what());
    }
    groups.push_back(std::move(g));
  }
  return SynonymTable(std::move(groups));
}

SynonymTable SynonymTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open synonym table");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::vector<std::string> SynonymTable::canonical_tokens(std::string_view text) const {
  auto toks = tokenize(text);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < toks.size()) {
    bool replaced = false;
    for (const auto& p : phrases_) {
      if (i + p.tokens.size() > toks.size()) continue;
      if (std::equal(p.tokens.begin(), p.tokens.end(), toks.begin() + static_cast<long>(i))) {
        out.insert(out.end(), p.canonical.begin(), p.canonical.end());
        i += p.tokens.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out.push_back(toks[i++]);
  }
  return out;
}

std::vector<std::string> SynonymTable::expand(std::string_view label) const {
  auto key = join(tokenize(label), " ");
  for (const auto& g : groups_) {
    bool hit = join(tokenize(g.canonical), " ") == key;
    for (const auto& s : g.synonyms) hit = hit || join(tokenize(s), " ") == key;
    if (hit) {
      std::vector<std::string> out{g.canonical};
      out.insert(out.end(), g.synonyms.begin(), g.synonyms.end());
      return out;
    }
  }
  return {std::string(label)};
}

}  // namespace primnav::perception
