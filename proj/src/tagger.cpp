#include "docape/tagger.hpp"

#include "docape/error.hpp"
#include "docape/util.hpp"

#include <toml.hpp>

#include <map>

namespace docape {

using nlohmann::json;

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::vector<std::string> whitespace_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        const auto start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i > start) tokens.emplace_back(text.substr(start, i - start));
    }
    return tokens;
}

bool is_punct(char c) {
    return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':' || c == '"' || c == '\'' ||
           c == '(' || c == ')' || c == '[' || c == ']' || c == '-';
}

/// Token with surrounding ASCII punctuation removed.
std::string core(std::string_view token) {
    std::size_t b = 0;
    std::size_t e = token.size();
    while (b < e && is_punct(token[b])) ++b;
    while (e > b && is_punct(token[e - 1])) --e;
    return std::string(token.substr(b, e - b));
}

std::set<std::string> string_set(const toml::table& root, std::string_view key, std::set<std::string> fallback) {
    const auto* node = root.get(key);
    if (!node) return fallback;
    const auto* array = node->as_array();
    if (!array) throw Error(ErrorCode::ParseError, "lexicons: " + std::string(key) + " must be an array of strings");
    std::set<std::string> out;
    for (const auto& item : *array) {
        auto value = item.value<std::string>();
        if (!value) throw Error(ErrorCode::ParseError, "lexicons: " + std::string(key) + " must hold strings");
        out.insert(*value);
    }
    return out;
}

}  // namespace

std::string_view to_string(Phenomenon phenomenon) {
    switch (phenomenon) {
        case Phenomenon::Pronoun: return "pronoun";
        case Phenomenon::Formality: return "formality";
        case Phenomenon::LexicalCohesion: return "lexical_cohesion";
    }
    return "pronoun";
}

json to_json(const TagSpan& tag) {
    return json{{"phenomenon", to_string(tag.phenomenon)},
                {"sentence_index", tag.sentence_index},
                {"token_index", tag.token_index},
                {"surface", tag.surface}};
}

TagLexicons TagLexicons::english_german() {
    TagLexicons lex;
    lex.ambiguous_target_pronouns = {"er", "sie", "es"};
    lex.source_trigger_pronouns = {"it", "they"};
    lex.formality_markers = {"Sie", "Ihnen", "Ihrer"};
    lex.stopwords = {"aber",  "alle",   "allen",  "alles",  "also",   "auch",   "dass",   "dann",  "denn",
                     "diese", "diesem", "diesen", "dieser", "dieses", "doch",   "dort",   "durch", "eine",
                     "einem", "einen",  "einer",  "eines",  "etwas",  "ganz",   "gegen",  "haben", "habe",
                     "hatte", "hatten", "heute",  "hier",   "ihnen",  "ihre",   "ihrer",  "immer", "jetzt",
                     "kann",  "können", "mehr",   "mein",   "meine",  "mich",   "müssen", "nach",  "nicht",
                     "noch",  "oder",   "ohne",   "schon",  "sein",   "seine",  "sehr",   "sich",  "sind",
                     "über",  "unter",  "viel",   "viele",  "waren",  "weil",   "wenn",   "werden", "wieder",
                     "wird",  "wurde",  "würde",  "zwischen"};
    lex.cohesion_min_length = 4;
    return lex;
}

TagLexicons parse_lexicons(std::string_view toml_text) {
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("lexicons: ") + std::string(e.description()),
                    std::to_string(e.source().begin.line));
    }
    auto lex = TagLexicons::english_german();
    lex.ambiguous_target_pronouns = string_set(root, "ambiguous_target_pronouns", lex.ambiguous_target_pronouns);
    lex.source_trigger_pronouns = string_set(root, "source_trigger_pronouns", lex.source_trigger_pronouns);
    lex.formality_markers = string_set(root, "formality_markers", lex.formality_markers);
    lex.stopwords = string_set(root, "stopwords", lex.stopwords);
    lex.cohesion_min_length =
        static_cast<std::size_t>(root["cohesion_min_length"].value_or<std::int64_t>(lex.cohesion_min_length));
    return lex;
}

TagLexicons load_lexicons(const std::filesystem::path& path) { return parse_lexicons(read_file(path)); }

std::vector<TagSpan> tag_document(const Document& target, const std::optional<Document>& source,
                                  const TagLexicons& lexicons) {
    if (source && source->size() != target.size()) {
        throw Error(ErrorCode::LengthMismatch, "source and target documents differ in sentence count", target.doc_id);
    }
    std::set<std::string> fold_pronouns;
    for (const auto& p : lexicons.ambiguous_target_pronouns) fold_pronouns.insert(fold_case(p));
    std::set<std::string> fold_triggers;
    for (const auto& p : lexicons.source_trigger_pronouns) fold_triggers.insert(fold_case(p));
    std::set<std::string> fold_stopwords;
    for (const auto& w : lexicons.stopwords) fold_stopwords.insert(fold_case(w));

    std::vector<TagSpan> tags;
    // Case-folded content word -> first sentence it appeared in.
    std::map<std::string, std::size_t> first_seen;
    for (std::size_t s = 0; s < target.size(); ++s) {
        const auto tokens = whitespace_tokens(target.sentences[s].text);

        bool triggered = false;
        if (source && !fold_pronouns.empty() && !fold_triggers.empty()) {
            for (const auto& token : whitespace_tokens(source->sentences[s].text)) {
                if (fold_triggers.count(fold_case(core(token)))) {
                    triggered = true;
                    break;
                }
            }
        }

        for (std::size_t t = 0; t < tokens.size(); ++t) {
            const auto word = core(tokens[t]);
            if (word.empty()) continue;
            const auto folded = fold_case(word);
            if (triggered && fold_pronouns.count(folded)) {
                tags.push_back({Phenomenon::Pronoun, s, t, word});
            }
            if (t > 0 && lexicons.formality_markers.count(word)) {
                tags.push_back({Phenomenon::Formality, s, t, word});
            }
            if (lexicons.cohesion_min_length > 0 && utf8_length(word) >= lexicons.cohesion_min_length &&
                !fold_stopwords.count(folded)) {
                auto [it, inserted] = first_seen.try_emplace(folded, s);
                if (!inserted && it->second < s) tags.push_back({Phenomenon::LexicalCohesion, s, t, word});
            }
        }
    }
    return tags;
}

}  // namespace docape
