// fml_xml.hpp : parse and serialize FML documents.
//
// The accepted XML vocabulary is the Mamdani subset: fuzzySystem,
// knowledgeBase, fuzzyVariable, fuzzyTerm, the four shape elements,
// mamdaniRuleBase, rule, antecedent, consequent and clause. Anything
// else is rejected.

#pragma once

#include <string>
#include <string_view>

#include "aifml/fml.hpp"

namespace aifml {

struct FmlError : std::runtime_error {
  enum class Kind {
    MalformedXml,     // input is not well-formed XML
    SchemaViolation,  // element or attribute missing or outside the subset
    SemanticError,    // document violates a type invariant
  };
  Kind kind;
  FmlError(Kind k, const std::string& message) : std::runtime_error(message), kind(k) {}
};

// Builds a document satisfying every type invariant, or throws FmlError.
FmlDocument parse_fml(std::string_view text);

// Canonical form: declaration order, fixed attribute order, two-space indent.
// Output parses back to a structurally equal document and is byte-stable.
std::string serialize_fml(const FmlDocument& doc);

}  // namespace aifml
