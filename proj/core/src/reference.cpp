#include "ontomatch/reference.hpp"

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontomatch/errors.hpp"

namespace ontomatch {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Minimal XML scanner, just enough for the alignment exchange format: element
// open/close/empty tags with attributes, character data, comments, CDATA,
// prolog and DOCTYPE. Namespace prefixes are stripped from element and
// attribute names; the five predefined entities and numeric character
// references are decoded.
// ---------------------------------------------------------------------------

struct XmlAttribute {
  std::string name;  // local name, prefix removed
  std::string value;
};

struct XmlToken {
  enum class Kind { open, close, empty, text } kind;
  std::string name;  // local name for tags
  std::string text;  // character data for text tokens
  std::vector<XmlAttribute> attributes;
};

class XmlScanner {
 public:
  explicit XmlScanner(std::string_view input) : in_(input) {}

  // Returns false at end of input. Throws ParseError on malformed markup.
  bool next(XmlToken& token) {
    while (pos_ < in_.size()) {
      if (in_[pos_] != '<') {
        token.kind = XmlToken::Kind::text;
        token.text = decode_entities(read_until('<'));
        return true;
      }
      if (starts_with("<!--")) {
        skip_past("-->", "unterminated comment");
        continue;
      }
      if (starts_with("<![CDATA[")) {
        std::size_t start = pos_ + 9;
        std::size_t end = in_.find("]]>", start);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        token.kind = XmlToken::Kind::text;
        token.text = std::string(in_.substr(start, end - start));
        pos_ = end + 3;
        return true;
      }
      if (starts_with("<?")) {
        skip_past("?>", "unterminated processing instruction");
        continue;
      }
      if (starts_with("<!")) {
        skip_past(">", "unterminated declaration");
        continue;
      }
      read_tag(token);
      return true;
    }
    return false;
  }

 private:
  bool starts_with(std::string_view prefix) const {
    return in_.substr(pos_, prefix.size()) == prefix;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < in_.size(); ++i) {
      if (in_[i] == '\n') { ++line; col = 1; } else { ++col; }
    }
    throw ParseError("malformed alignment document: " + msg, line, col);
  }

  void skip_past(std::string_view marker, const char* err) {
    std::size_t end = in_.find(marker, pos_);
    if (end == std::string_view::npos) fail(err);
    pos_ = end + marker.size();
  }

  std::string_view read_until(char stop) {
    std::size_t start = pos_;
    while (pos_ < in_.size() && in_[pos_] != stop) ++pos_;
    return in_.substr(start, pos_ - start);
  }

  void skip_space() {
    while (pos_ < in_.size() && std::isspace(static_cast<unsigned char>(in_[pos_]))) ++pos_;
  }

  static std::string local_name(std::string_view qualified) {
    std::size_t colon = qualified.rfind(':');
    if (colon == std::string_view::npos) return std::string(qualified);
    return std::string(qualified.substr(colon + 1));
  }

  std::string read_name() {
    std::size_t start = pos_;
    while (pos_ < in_.size()) {
      char c = in_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '>' || c == '/' || c == '=') break;
      ++pos_;
    }
    if (pos_ == start) fail("expected a name");
    return std::string(in_.substr(start, pos_ - start));
  }

  void read_tag(XmlToken& token) {
    ++pos_;  // consume '<'
    token.attributes.clear();
    token.text.clear();
    bool closing = false;
    if (pos_ < in_.size() && in_[pos_] == '/') {
      closing = true;
      ++pos_;
    }
    token.name = local_name(read_name());

    bool self_closing = false;
    for (;;) {
      skip_space();
      if (pos_ >= in_.size()) fail("unterminated tag");
      if (in_[pos_] == '>') {
        ++pos_;
        break;
      }
      if (in_[pos_] == '/') {
        ++pos_;
        skip_space();
        if (pos_ >= in_.size() || in_[pos_] != '>') fail("expected '>' after '/'");
        ++pos_;
        self_closing = true;
        break;
      }
      XmlAttribute attr;
      attr.name = local_name(read_name());
      skip_space();
      if (pos_ >= in_.size() || in_[pos_] != '=') fail("expected '=' in attribute");
      ++pos_;
      skip_space();
      if (pos_ >= in_.size() || (in_[pos_] != '"' && in_[pos_] != '\'')) {
        fail("expected quoted attribute value");
      }
      char quote = in_[pos_++];
      std::size_t start = pos_;
      while (pos_ < in_.size() && in_[pos_] != quote) ++pos_;
      if (pos_ >= in_.size()) fail("unterminated attribute value");
      attr.value = decode_entities(in_.substr(start, pos_ - start));
      ++pos_;  // consume closing quote
      if (!closing) token.attributes.push_back(std::move(attr));
    }

    token.kind = closing          ? XmlToken::Kind::close
                 : self_closing   ? XmlToken::Kind::empty
                                  : XmlToken::Kind::open;
  }

  std::string decode_entities(std::string_view raw) const {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size();) {
      if (raw[i] != '&') {
        out.push_back(raw[i++]);
        continue;
      }
      std::size_t semi = raw.find(';', i);
      if (semi == std::string_view::npos) fail("unterminated entity reference");
      std::string_view name = raw.substr(i + 1, semi - i - 1);
      if (name == "amp") out.push_back('&');
      else if (name == "lt") out.push_back('<');
      else if (name == "gt") out.push_back('>');
      else if (name == "apos") out.push_back('\'');
      else if (name == "quot") out.push_back('"');
      else if (!name.empty() && name[0] == '#') append_codepoint(out, name.substr(1));
      else fail("unknown entity reference &" + std::string(name) + ";");
      i = semi + 1;
    }
    return out;
  }

  void append_codepoint(std::string& out, std::string_view digits) const {
    if (digits.empty()) fail("empty character reference");
    std::uint32_t cp = 0;
    if (digits[0] == 'x' || digits[0] == 'X') {
      for (char c : digits.substr(1)) {
        if (!std::isxdigit(static_cast<unsigned char>(c))) fail("bad character reference");
        cp = cp * 16 + static_cast<std::uint32_t>(std::isdigit(static_cast<unsigned char>(c))
                                                      ? c - '0'
                                                      : std::tolower(c) - 'a' + 10);
      }
    } else {
      for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c))) fail("bad character reference");
        cp = cp * 10 + static_cast<std::uint32_t>(c - '0');
      }
    }
    // UTF-8 encode
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
      out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

ReferenceAlignment parse_alignment_xml(std::string_view document) {
  ReferenceAlignment ref;
  XmlScanner scanner(document);
  XmlToken token;

  bool in_cell = false;
  std::string entity1, entity2, relation;
  bool have_entity1 = false, have_entity2 = false;
  std::string* pending_text = nullptr;  // element whose character data we collect
  std::string text_buffer;

  auto resource_of = [](const XmlToken& t) -> const std::string* {
    for (const auto& attr : t.attributes) {
      if (attr.name == "resource" || attr.name == "about") return &attr.value;
    }
    return nullptr;
  };

  bool saw_any_tag = false;
  while (scanner.next(token)) {
    switch (token.kind) {
      case XmlToken::Kind::text:
        if (pending_text != nullptr) *pending_text += token.text;
        break;
      case XmlToken::Kind::open:
      case XmlToken::Kind::empty:
        saw_any_tag = true;
        if (token.name == "Cell") {
          in_cell = true;
          entity1.clear();
          entity2.clear();
          relation.clear();
          have_entity1 = have_entity2 = false;
        } else if (in_cell && (token.name == "entity1" || token.name == "entity2")) {
          const std::string* res = resource_of(token);
          if (res != nullptr) {
            (token.name == "entity1" ? entity1 : entity2) = *res;
            (token.name == "entity1" ? have_entity1 : have_entity2) = true;
          }
        } else if (in_cell && token.name == "relation" && token.kind == XmlToken::Kind::open) {
          text_buffer.clear();
          pending_text = &text_buffer;
        }
        break;
      case XmlToken::Kind::close:
        if (token.name == "relation" && pending_text != nullptr) {
          relation = trimmed(text_buffer);
          pending_text = nullptr;
        } else if (token.name == "Cell" && in_cell) {
          in_cell = false;
          // Relation defaults to equivalence when the element is absent.
          if (relation.empty() || relation == "=") {
            if (!have_entity1 || !have_entity2) {
              throw ParseError("alignment cell is missing entity1/entity2 resources");
            }
            ref.pairs.emplace(entity1, entity2);
          }
        }
        break;
    }
  }

  if (!saw_any_tag) throw ParseError("alignment document contains no XML elements");
  if (ref.pairs.empty()) {
    throw MetricError("reference alignment contains no equivalence cells");
  }
  return ref;
}

ReferenceAlignment parse_native(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed reference document: ") + e.what());
  }

  ReferenceAlignment ref;
  const json* records = nullptr;
  if (doc.is_array()) {
    records = &doc;
  } else if (doc.is_object() && doc.contains("pairs") && doc["pairs"].is_array()) {
    ref.name = doc.value("name", std::string{});
    records = &doc["pairs"];
  } else {
    throw ParseError("reference document must be a JSON array or an object with a \"pairs\" array");
  }

  for (const auto& rec : *records) {
    if (!rec.is_object() || !rec.contains("source") || !rec.contains("target") ||
        !rec["source"].is_string() || !rec["target"].is_string()) {
      throw ParseError("each reference record needs string \"source\" and \"target\" fields");
    }
    ref.pairs.emplace(rec["source"].get<std::string>(), rec["target"].get<std::string>());
  }
  if (ref.pairs.empty()) {
    throw MetricError("reference alignment is empty");
  }
  return ref;
}

}  // namespace

ReferenceAlignment parse_reference_alignment(std::string_view document, ReferenceFormat format) {
  return format == ReferenceFormat::native ? parse_native(document) : parse_alignment_xml(document);
}

}  // namespace ontomatch
