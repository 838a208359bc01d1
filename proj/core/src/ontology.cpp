#include "ontomatch/ontology.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "ontomatch/errors.hpp"
#include "ontomatch/hash.hpp"
#include "ontomatch/text.hpp"

namespace ontomatch {

using nlohmann::json;

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::C: return "C";
    case Variant::CP: return "CP";
    case Variant::CC: return "CC";
  }
  return "C";
}

Variant variant_from_string(std::string_view s) {
  if (s == "C") return Variant::C;
  if (s == "CP") return Variant::CP;
  if (s == "CC") return Variant::CC;
  throw ConfigError("unknown representation variant \"" + std::string(s) + "\" (expected C, CP or CC)");
}

Ontology::Ontology(std::string name, Role role, std::vector<Concept> concepts)
    : name_(std::move(name)), role_(role), concepts_(std::move(concepts)) {
  index_.reserve(concepts_.size());
  for (std::size_t i = 0; i < concepts_.size(); ++i) {
    index_.emplace(concepts_[i].id, i);
  }
}

bool Ontology::contains(std::string_view id) const {
  return index_.find(std::string(id)) != index_.end();
}

const Concept& Ontology::at(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) {
    throw NotFoundError("unknown concept id \"" + std::string(id) + "\" in ontology \"" + name_ + "\"");
  }
  return concepts_[it->second];
}

namespace {

// Convert a nlohmann byte offset into 1-based line/column for error messages.
std::pair<std::size_t, std::size_t> line_column_at(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::vector<std::string> string_array(const json& obj, const char* key) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end()) return out;
  if (!it->is_array()) {
    throw ValidationError(std::string("field \"") + key + "\" must be an array of strings");
  }
  out.reserve(it->size());
  for (const auto& item : *it) {
    if (!item.is_string()) {
      throw ValidationError(std::string("field \"") + key + "\" must contain only strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

void append_unique(std::vector<std::string>& list, const std::string& id) {
  if (std::find(list.begin(), list.end(), id) == list.end()) {
    list.push_back(id);
  }
}

}  // namespace

Ontology parse_ontology(std::string_view document, Role role) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_column_at(document, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(std::string("malformed ontology document: ") + e.what(), line, col);
  }

  if (!doc.is_object()) throw ValidationError("ontology document must be a JSON object");
  if (!doc.contains("concepts") || !doc["concepts"].is_array()) {
    throw ValidationError("ontology document must carry a \"concepts\" array");
  }

  std::string name = doc.value("name", std::string{});
  std::vector<Concept> concepts;
  concepts.reserve(doc["concepts"].size());

  std::unordered_map<std::string, std::size_t> index;
  for (const auto& entry : doc["concepts"]) {
    if (!entry.is_object()) throw ValidationError("each concept must be a JSON object");
    Concept c;
    if (!entry.contains("id") || !entry["id"].is_string()) {
      throw ValidationError("concept is missing a string \"id\"");
    }
    c.id = entry["id"].get<std::string>();
    if (c.id.empty()) throw ValidationError("concept id must be non-empty");
    if (!entry.contains("label") || !entry["label"].is_string()) {
      throw ValidationError("concept \"" + c.id + "\" is missing a string \"label\"");
    }
    c.label = entry["label"].get<std::string>();
    if (normalize_text(c.label).empty()) {
      throw ValidationError("concept \"" + c.id + "\" has an empty label after normalization");
    }
    c.synonyms = string_array(entry, "synonyms");
    c.parent_ids = string_array(entry, "parents");
    c.child_ids = string_array(entry, "children");

    if (!index.emplace(c.id, concepts.size()).second) {
      throw ValidationError("duplicate concept id \"" + c.id + "\"");
    }
    concepts.push_back(std::move(c));
  }

  // Validate edges, reject self-loops.
  for (const auto& c : concepts) {
    for (const auto& list : {&c.parent_ids, &c.child_ids}) {
      for (const auto& ref : *list) {
        if (ref == c.id) {
          throw ValidationError("concept \"" + c.id + "\" refers to itself as parent/child");
        }
        if (index.find(ref) == index.end()) {
          throw ValidationError("concept \"" + c.id + "\" refers to unknown concept \"" + ref + "\"");
        }
      }
    }
  }

  // Symmetry closure: a declared edge in either direction implies the reverse.
  // Reverse edges are appended in document order of the declaring concept.
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    for (const auto& pid : concepts[i].parent_ids) {
      append_unique(concepts[index[pid]].child_ids, concepts[i].id);
    }
    for (const auto& cid : concepts[i].child_ids) {
      append_unique(concepts[index[cid]].parent_ids, concepts[i].id);
    }
  }

  return Ontology(std::move(name), role, std::move(concepts));
}

Ontology parse_ontology(std::istream& document, Role role) {
  std::ostringstream buf;
  buf << document.rdbuf();
  return parse_ontology(buf.str(), role);
}

ConceptRepresentation build_representation(const Ontology& ontology, std::string_view concept_id,
                                           Variant variant) {
  const Concept& c = ontology.at(concept_id);

  std::string raw = c.label;
  for (const auto& syn : c.synonyms) {
    raw += ' ';
    raw += syn;
  }

  ConceptRepresentation rep;
  rep.concept_id = c.id;
  rep.variant = variant;
  rep.core_text = normalize_text(raw);

  const std::vector<std::string>* context_ids = nullptr;
  if (variant == Variant::CP) context_ids = &c.parent_ids;
  if (variant == Variant::CC) context_ids = &c.child_ids;
  if (context_ids != nullptr) {
    rep.context_texts.reserve(context_ids->size());
    for (const auto& id : *context_ids) {
      rep.context_texts.push_back(normalize_text(ontology.at(id).label));
    }
  }
  return rep;
}

std::string verbalize_representation(const ConceptRepresentation& rep) {
  if (rep.variant == Variant::C || rep.context_texts.empty()) {
    return rep.core_text;
  }
  std::string out = rep.core_text;
  out += rep.variant == Variant::CP ? ", parents: " : ", children: ";
  for (std::size_t i = 0; i < rep.context_texts.size(); ++i) {
    if (i > 0) out += ", ";
    out += rep.context_texts[i];
  }
  return out;
}

std::uint64_t ontology_content_hash(const Ontology& ontology) {
  std::uint64_t h = fnv1a64(ontology.name());
  auto mix = [&h](std::string_view part) {
    h = fnv1a64(part, h);
    h = fnv1a64(std::string_view("\x1f", 1), h);
  };
  for (const auto& c : ontology.concepts()) {
    mix(c.id);
    mix(c.label);
    for (const auto& s : c.synonyms) mix(s);
    mix("|");
    for (const auto& p : c.parent_ids) mix(p);
    mix("|");
    for (const auto& k : c.child_ids) mix(k);
    mix(";");
  }
  return h;
}

}  // namespace ontomatch
