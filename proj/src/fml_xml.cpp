#include "aifml/fml_xml.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace aifml {

namespace {

// --- minimal XML reader ------------------------------------------------------
// Elements, attributes, character data and comments; UTF-8 passthrough.
// Anything fancier (DOCTYPE, CDATA, processing instructions past the
// declaration) is out of the subset and reported as malformed input.

struct XmlNode {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<XmlNode> children;
  std::string text;  // concatenated character data

  const std::string* attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes)
      if (k == key) return &v;
    return nullptr;
  }
};

[[noreturn]] void malformed(const std::string& message) {
  throw FmlError(FmlError::Kind::MalformedXml, "malformed XML: " + message);
}

class XmlReader {
 public:
  explicit XmlReader(std::string_view text) : text_(text) {}

  XmlNode parse_document() {
    skip_prolog();
    XmlNode root = parse_element();
    skip_misc();
    if (pos_ != text_.size()) malformed("content after the root element");
    return root;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  void skip_whitespace() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  void skip_comment() {
    pos_ += 4;  // "<!--"
    const auto end = text_.find("-->", pos_);
    if (end == std::string_view::npos) malformed("unterminated comment");
    pos_ = end + 3;
  }

  void skip_prolog() {
    skip_whitespace();
    if (starts_with("<?xml")) {
      const auto end = text_.find("?>", pos_);
      if (end == std::string_view::npos) malformed("unterminated XML declaration");
      pos_ = end + 2;
    }
    skip_misc();
    if (eof() || peek() != '<') malformed("expected a root element");
    if (starts_with("<!")) malformed("unsupported construct at document level");
  }

  void skip_misc() {
    for (;;) {
      skip_whitespace();
      if (starts_with("<!--")) {
        skip_comment();
        continue;
      }
      return;
    }
  }

  std::string parse_name() {
    const std::size_t start = pos_;
    while (!eof()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
          c == ':') {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == start) malformed("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string decode_entities(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size();) {
      if (raw[i] != '&') {
        out.push_back(raw[i++]);
        continue;
      }
      const auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) malformed("unterminated entity reference");
      const std::string_view entity = raw.substr(i + 1, semi - i - 1);
      if (entity == "amp") out.push_back('&');
      else if (entity == "lt") out.push_back('<');
      else if (entity == "gt") out.push_back('>');
      else if (entity == "quot") out.push_back('"');
      else if (entity == "apos") out.push_back('\'');
      else if (!entity.empty() && entity[0] == '#') {
        unsigned long code = 0;
        try {
          code = entity[1] == 'x' || entity[1] == 'X'
                     ? std::stoul(std::string(entity.substr(2)), nullptr, 16)
                     : std::stoul(std::string(entity.substr(1)), nullptr, 10);
        } catch (const std::exception&) {
          malformed("invalid character reference");
        }
        if (code == 0 || code > 0x10FFFF) malformed("character reference out of range");
        append_utf8(out, static_cast<char32_t>(code));
      } else {
        malformed("unknown entity '&" + std::string(entity) + ";'");
      }
      i = semi + 1;
    }
    return out;
  }

  static void append_utf8(std::string& out, char32_t code) {
    if (code < 0x80) {
      out.push_back(static_cast<char>(code));
    } else if (code < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (code >> 6)));
      out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
    } else if (code < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (code >> 12)));
      out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (code >> 18)));
      out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
    }
  }

  std::string parse_attribute_value() {
    if (eof() || (peek() != '"' && peek() != '\'')) malformed("expected a quoted attribute value");
    const char quote = peek();
    ++pos_;
    const std::size_t start = pos_;
    while (!eof() && peek() != quote) {
      if (peek() == '<') malformed("'<' inside attribute value");
      ++pos_;
    }
    if (eof()) malformed("unterminated attribute value");
    const std::string_view raw = text_.substr(start, pos_ - start);
    ++pos_;
    return decode_entities(raw);
  }

  XmlNode parse_element() {
    if (eof() || peek() != '<') malformed("expected an element");
    ++pos_;
    XmlNode node;
    node.name = parse_name();

    for (;;) {
      skip_whitespace();
      if (eof()) malformed("unterminated start tag of <" + node.name + ">");
      if (peek() == '>') {
        ++pos_;
        break;
      }
      if (starts_with("/>")) {
        pos_ += 2;
        return node;
      }
      std::string key = parse_name();
      skip_whitespace();
      if (eof() || peek() != '=') malformed("expected '=' after attribute name '" + key + "'");
      ++pos_;
      skip_whitespace();
      std::string value = parse_attribute_value();
      if (node.attribute(key) != nullptr)
        malformed("duplicate attribute '" + key + "' on <" + node.name + ">");
      node.attributes.emplace_back(std::move(key), std::move(value));
    }

    // content until the matching end tag
    for (;;) {
      const std::size_t chunk_start = pos_;
      while (!eof() && peek() != '<') ++pos_;
      if (chunk_start != pos_)
        node.text += decode_entities(text_.substr(chunk_start, pos_ - chunk_start));
      if (eof()) malformed("missing end tag for <" + node.name + ">");
      if (starts_with("<!--")) {
        skip_comment();
        continue;
      }
      if (starts_with("<!")) malformed("unsupported construct inside <" + node.name + ">");
      if (starts_with("</")) {
        pos_ += 2;
        const std::string end_name = parse_name();
        if (end_name != node.name)
          malformed("end tag </" + end_name + "> does not match <" + node.name + ">");
        skip_whitespace();
        if (eof() || peek() != '>') malformed("unterminated end tag </" + end_name + ">");
        ++pos_;
        return node;
      }
      node.children.push_back(parse_element());
    }
  }
};

// --- subset schema -----------------------------------------------------------

[[noreturn]] void schema_error(const std::string& message) {
  throw FmlError(FmlError::Kind::SchemaViolation, "schema violation: " + message);
}

void require_known_attributes(const XmlNode& node, std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : node.attributes) {
    bool found = false;
    for (const auto& k : known)
      if (key == k) found = true;
    if (!found) schema_error("attribute '" + key + "' not allowed on <" + node.name + ">");
  }
}

const std::string& require_attribute(const XmlNode& node, std::string_view key) {
  const std::string* value = node.attribute(key);
  if (value == nullptr)
    schema_error("<" + node.name + "> is missing required attribute '" + std::string(key) + "'");
  return *value;
}

double parse_number(const XmlNode& node, std::string_view key, const std::string& raw) {
  double value = 0;
  const char* first = raw.data();
  const char* last = raw.data() + raw.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    schema_error("attribute '" + std::string(key) + "' on <" + node.name +
                 "> must be a number, got '" + raw + "'");
  return value;
}

double require_number(const XmlNode& node, std::string_view key) {
  return parse_number(node, key, require_attribute(node, key));
}

bool parse_bool(const XmlNode& node, std::string_view key, bool fallback) {
  const std::string* raw = node.attribute(key);
  if (raw == nullptr) return fallback;
  if (*raw == "true") return true;
  if (*raw == "false") return false;
  schema_error("attribute '" + std::string(key) + "' on <" + node.name +
               "> must be 'true' or 'false', got '" + *raw + "'");
}

void require_no_text(const XmlNode& node) {
  for (const char c : node.text)
    if (!std::isspace(static_cast<unsigned char>(c)))
      schema_error("<" + node.name + "> must not contain character data");
}

MembershipFunction build_shape(const XmlNode& node) {
  if (node.name == "triangularShape") {
    require_known_attributes(node, {"param1", "param2", "param3"});
    return Triangular{require_number(node, "param1"), require_number(node, "param2"),
                      require_number(node, "param3")};
  }
  if (node.name == "trapezoidShape") {
    require_known_attributes(node, {"param1", "param2", "param3", "param4"});
    return Trapezoidal{require_number(node, "param1"), require_number(node, "param2"),
                       require_number(node, "param3"), require_number(node, "param4")};
  }
  if (node.name == "gaussianShape") {
    require_known_attributes(node, {"param1", "param2"});
    return Gaussian{require_number(node, "param1"), require_number(node, "param2")};
  }
  if (node.name == "singletonShape") {
    require_known_attributes(node, {"param1"});
    return Singleton{require_number(node, "param1")};
  }
  schema_error("unknown shape element <" + node.name + ">");
}

FuzzyTerm build_term(const XmlNode& node) {
  require_known_attributes(node, {"name", "complement"});
  require_no_text(node);
  FuzzyTerm term;
  term.name = require_attribute(node, "name");
  term.complement = parse_bool(node, "complement", false);
  if (node.children.size() != 1)
    schema_error("<fuzzyTerm> '" + term.name + "' must contain exactly one shape element");
  term.mf = build_shape(node.children.front());
  return term;
}

FuzzyVariable build_variable(const XmlNode& node) {
  require_known_attributes(node, {"name", "domainLeft", "domainRight", "type", "defuzzifier"});
  require_no_text(node);
  FuzzyVariable variable;
  variable.name = require_attribute(node, "name");
  variable.domain_left = require_number(node, "domainLeft");
  variable.domain_right = require_number(node, "domainRight");

  const std::string& type = require_attribute(node, "type");
  if (type == "input") variable.kind = VariableKind::Input;
  else if (type == "output") variable.kind = VariableKind::Output;
  else schema_error("variable '" + variable.name + "' has unknown type '" + type + "'");

  const std::string* defuzzifier = node.attribute("defuzzifier");
  if (variable.kind == VariableKind::Input) {
    if (defuzzifier != nullptr)
      schema_error("input variable '" + variable.name + "' must not declare a defuzzifier");
  } else {
    const std::string& method = defuzzifier ? *defuzzifier : std::string("centroid");
    if (method == "centroid") variable.defuzzifier = Defuzzifier::Centroid;
    else if (method == "meanOfMaxima") variable.defuzzifier = Defuzzifier::MeanOfMaxima;
    else if (method == "weightedAverage") variable.defuzzifier = Defuzzifier::WeightedAverage;
    else schema_error("variable '" + variable.name + "' has unknown defuzzifier '" + method + "'");
  }

  for (const auto& child : node.children) {
    if (child.name != "fuzzyTerm")
      schema_error("unexpected element <" + child.name + "> inside <fuzzyVariable>");
    variable.terms.push_back(build_term(child));
  }
  return variable;
}

Clause build_clause(const XmlNode& node, bool antecedent_side) {
  require_known_attributes(node, {"not"});
  require_no_text(node);
  Clause clause;
  clause.negated = parse_bool(node, "not", false);
  if (!antecedent_side && clause.negated)
    schema_error("consequent <clause> must not carry a 'not' attribute");
  bool have_variable = false, have_term = false;
  for (const auto& child : node.children) {
    if (child.name == "variable" && !have_variable) {
      if (!child.children.empty()) schema_error("<variable> must contain only text");
      clause.variable = child.text;
      have_variable = true;
    } else if (child.name == "term" && !have_term) {
      if (!child.children.empty()) schema_error("<term> must contain only text");
      clause.term = child.text;
      have_term = true;
    } else {
      schema_error("unexpected element <" + child.name + "> inside <clause>");
    }
  }
  if (!have_variable || !have_term)
    schema_error("<clause> must contain one <variable> and one <term>");
  return clause;
}

std::vector<Clause> build_clause_list(const XmlNode& node, bool antecedent_side) {
  require_known_attributes(node, {});
  require_no_text(node);
  std::vector<Clause> clauses;
  for (const auto& child : node.children) {
    if (child.name != "clause")
      schema_error("unexpected element <" + child.name + "> inside <" + node.name + ">");
    clauses.push_back(build_clause(child, antecedent_side));
  }
  if (clauses.empty()) schema_error("<" + node.name + "> must contain at least one <clause>");
  return clauses;
}

Rule build_rule(const XmlNode& node) {
  require_known_attributes(node, {"name", "weight", "connector"});
  require_no_text(node);
  Rule rule;
  rule.name = require_attribute(node, "name");
  if (node.attribute("weight") != nullptr) rule.weight = require_number(node, "weight");
  if (const std::string* connector = node.attribute("connector")) {
    if (*connector == "and") rule.connector = Connector::And;
    else if (*connector == "or") rule.connector = Connector::Or;
    else schema_error("rule '" + rule.name + "' has unknown connector '" + *connector + "'");
  }
  bool have_antecedent = false, have_consequent = false;
  for (const auto& child : node.children) {
    if (child.name == "antecedent" && !have_antecedent) {
      rule.antecedent = build_clause_list(child, true);
      have_antecedent = true;
    } else if (child.name == "consequent" && !have_consequent) {
      rule.consequent = build_clause_list(child, false);
      have_consequent = true;
    } else {
      schema_error("unexpected element <" + child.name + "> inside <rule>");
    }
  }
  if (!have_antecedent || !have_consequent)
    schema_error("rule '" + rule.name + "' must contain one <antecedent> and one <consequent>");
  return rule;
}

RuleBase build_rule_base(const XmlNode& node) {
  require_known_attributes(node, {"andMethod", "orMethod", "activationMethod"});
  require_no_text(node);
  RuleBase rule_base;
  if (const std::string* method = node.attribute("andMethod")) {
    if (*method == "min") rule_base.and_method = AndMethod::Min;
    else if (*method == "prod") rule_base.and_method = AndMethod::Prod;
    else schema_error("unknown andMethod '" + *method + "'");
  }
  if (const std::string* method = node.attribute("orMethod")) {
    if (*method == "max") rule_base.or_method = OrMethod::Max;
    else schema_error("unknown orMethod '" + *method + "'");
  }
  if (const std::string* method = node.attribute("activationMethod")) {
    if (*method == "min") rule_base.activation = ActivationMethod::Min;
    else if (*method == "prod") rule_base.activation = ActivationMethod::Prod;
    else schema_error("unknown activationMethod '" + *method + "'");
  }
  for (const auto& child : node.children) {
    if (child.name != "rule")
      schema_error("unexpected element <" + child.name + "> inside <mamdaniRuleBase>");
    rule_base.rules.push_back(build_rule(child));
  }
  return rule_base;
}

FmlDocument build_document(const XmlNode& root) {
  if (root.name != "fuzzySystem")
    schema_error("root element must be <fuzzySystem>, got <" + root.name + ">");
  require_known_attributes(root, {"name"});
  require_no_text(root);

  FmlDocument doc;
  doc.name = require_attribute(root, "name");
  bool have_kb = false, have_rb = false;
  for (const auto& child : root.children) {
    if (child.name == "knowledgeBase" && !have_kb) {
      require_known_attributes(child, {});
      require_no_text(child);
      for (const auto& v : child.children) {
        if (v.name != "fuzzyVariable")
          schema_error("unexpected element <" + v.name + "> inside <knowledgeBase>");
        doc.knowledge_base.push_back(build_variable(v));
      }
      have_kb = true;
    } else if (child.name == "mamdaniRuleBase" && !have_rb) {
      doc.rule_base = build_rule_base(child);
      have_rb = true;
    } else {
      schema_error("unexpected element <" + child.name + "> inside <fuzzySystem>");
    }
  }
  if (!have_kb) schema_error("<fuzzySystem> must contain a <knowledgeBase>");
  if (!have_rb) schema_error("<fuzzySystem> must contain a <mamdaniRuleBase>");
  return doc;
}

// --- serialization -----------------------------------------------------------

std::string format_number(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

std::string escape(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (const char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

void write_shape(std::ostream& os, const MembershipFunction& mf) {
  struct Write {
    std::ostream& os;
    void operator()(const Triangular& s) const {
      os << "<triangularShape param1=\"" << format_number(s.a) << "\" param2=\""
         << format_number(s.b) << "\" param3=\"" << format_number(s.c) << "\"/>";
    }
    void operator()(const Trapezoidal& s) const {
      os << "<trapezoidShape param1=\"" << format_number(s.a) << "\" param2=\""
         << format_number(s.b) << "\" param3=\"" << format_number(s.c) << "\" param4=\""
         << format_number(s.d) << "\"/>";
    }
    void operator()(const Gaussian& s) const {
      os << "<gaussianShape param1=\"" << format_number(s.mean) << "\" param2=\""
         << format_number(s.sigma) << "\"/>";
    }
    void operator()(const Singleton& s) const {
      os << "<singletonShape param1=\"" << format_number(s.value) << "\"/>";
    }
  };
  std::visit(Write{os}, mf);
}

void write_clauses(std::ostream& os, const std::vector<Clause>& clauses, const char* tag) {
  os << "      <" << tag << ">\n";
  for (const auto& clause : clauses) {
    os << "        <clause";
    if (clause.negated) os << " not=\"true\"";
    os << "><variable>" << escape(clause.variable) << "</variable><term>" << escape(clause.term)
       << "</term></clause>\n";
  }
  os << "      </" << tag << ">\n";
}

}  // namespace

FmlDocument parse_fml(std::string_view text) {
  XmlReader reader(text);
  FmlDocument doc = build_document(reader.parse_document());
  const std::vector<Violation> violations = validate(doc);
  if (!violations.empty()) {
    std::ostringstream message;
    message << "invalid document:";
    for (const auto& v : violations) message << " [" << v.element << ": " << v.constraint << "]";
    throw FmlError(FmlError::Kind::SemanticError, message.str());
  }
  return doc;
}

std::string serialize_fml(const FmlDocument& doc) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<fuzzySystem name=\"" << escape(doc.name) << "\">\n";
  os << "  <knowledgeBase>\n";
  for (const auto& variable : doc.knowledge_base) {
    os << "    <fuzzyVariable name=\"" << escape(variable.name) << "\" domainLeft=\""
       << format_number(variable.domain_left) << "\" domainRight=\""
       << format_number(variable.domain_right) << "\" type=\""
       << (variable.kind == VariableKind::Input ? "input" : "output") << "\"";
    if (variable.kind == VariableKind::Output) {
      const char* method = variable.defuzzifier == Defuzzifier::Centroid ? "centroid"
                           : variable.defuzzifier == Defuzzifier::MeanOfMaxima
                               ? "meanOfMaxima"
                               : "weightedAverage";
      os << " defuzzifier=\"" << method << "\"";
    }
    os << ">\n";
    for (const auto& term : variable.terms) {
      os << "      <fuzzyTerm name=\"" << escape(term.name) << "\" complement=\""
         << (term.complement ? "true" : "false") << "\">\n";
      os << "        ";
      write_shape(os, term.mf);
      os << "\n      </fuzzyTerm>\n";
    }
    os << "    </fuzzyVariable>\n";
  }
  os << "  </knowledgeBase>\n";
  os << "  <mamdaniRuleBase andMethod=\""
     << (doc.rule_base.and_method == AndMethod::Min ? "min" : "prod") << "\" orMethod=\"max\""
     << " activationMethod=\""
     << (doc.rule_base.activation == ActivationMethod::Min ? "min" : "prod") << "\">\n";
  for (const auto& rule : doc.rule_base.rules) {
    os << "    <rule name=\"" << escape(rule.name) << "\" weight=\"" << format_number(rule.weight)
       << "\" connector=\"" << (rule.connector == Connector::And ? "and" : "or") << "\">\n";
    write_clauses(os, rule.antecedent, "antecedent");
    write_clauses(os, rule.consequent, "consequent");
    os << "    </rule>\n";
  }
  os << "  </mamdaniRuleBase>\n";
  os << "</fuzzySystem>\n";
  return os.str();
}

}  // namespace aifml
