#pragma once

#include "docape/text.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace docape {

enum class Phenomenon { Pronoun, Formality, LexicalCohesion };

inline constexpr Phenomenon kPhenomena[] = {Phenomenon::Pronoun, Phenomenon::Formality, Phenomenon::LexicalCohesion};

/// pronoun / formality / lexical_cohesion
std::string_view to_string(Phenomenon phenomenon);

/// `surface` is the token with edge punctuation stripped.
struct TagSpan {
    Phenomenon phenomenon = Phenomenon::Pronoun;
    std::size_t sentence_index = 0;
    std::size_t token_index = 0;
    std::string surface;

    friend bool operator==(const TagSpan&, const TagSpan&) = default;
};

nlohmann::json to_json(const TagSpan& tag);

/// Rule-family configuration. An empty set disables the rule that reads it.
struct TagLexicons {
    /// Case-folded target pronouns whose form depends on the antecedent.
    std::set<std::string> ambiguous_target_pronouns;
    /// Case-folded source pronouns that make the target pronoun context-dependent.
    std::set<std::string> source_trigger_pronouns;
    /// Formal second-person forms, matched case-sensitively and never sentence-initially.
    std::set<std::string> formality_markers;
    /// Case-folded words never counted as lexical cohesion.
    std::set<std::string> stopwords;
    /// Minimum length in code points for a cohesion candidate; 0 disables the rule.
    std::size_t cohesion_min_length = 4;

    /// EN->DE defaults.
    static TagLexicons english_german();
};

/// TOML with keys ambiguous_target_pronouns, source_trigger_pronouns, formality_markers,
/// stopwords (string arrays) and cohesion_min_length (integer). Missing keys keep the defaults.
TagLexicons load_lexicons(const std::filesystem::path& path);
TagLexicons parse_lexicons(std::string_view toml_text);

/// Tags context-dependent words of `target`. The pronoun rule needs the aligned `source`.
/// LengthMismatch when the documents differ in sentence count.
std::vector<TagSpan> tag_document(const Document& target, const std::optional<Document>& source,
                                  const TagLexicons& lexicons);

}  // namespace docape
