#include "docape/metrics.hpp"

#include "docape/error.hpp"
#include "docape/util.hpp"

#include <cmath>
#include <string_view>

namespace docape {

using nlohmann::json;

namespace {

constexpr std::string_view kBleuPunct = ".,!?;:\"()";

void require_corpus(std::size_t hyps, std::size_t refs) {
    if (hyps != refs) {
        throw Error(ErrorCode::LengthMismatch, "hypothesis and reference counts differ",
                    std::to_string(hyps) + " vs " + std::to_string(refs));
    }
    if (hyps == 0) throw Error(ErrorCode::EmptyCorpus, "metric over an empty corpus");
}

template <typename Seq>
std::map<Seq, std::size_t> ngram_counts(const std::vector<typename Seq::value_type>& items, std::size_t n) {
    std::map<Seq, std::size_t> counts;
    if (items.size() < n) return counts;
    for (std::size_t i = 0; i + n <= items.size(); ++i) ++counts[Seq(items.begin() + i, items.begin() + i + n)];
    return counts;
}

template <typename Map>
std::size_t clipped_matches(const Map& hyp, const Map& ref) {
    std::size_t matched = 0;
    for (const auto& [gram, count] : hyp) {
        if (auto it = ref.find(gram); it != ref.end()) matched += std::min(count, it->second);
    }
    return matched;
}

}  // namespace

std::vector<std::string> bleu_tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) tokens.push_back(std::move(current));
        current.clear();
    };
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            flush();
        } else if (kBleuPunct.find(c) != std::string_view::npos) {
            flush();
            tokens.emplace_back(1, c);
        } else {
            current.push_back(c);
        }
    }
    flush();
    return tokens;
}

void BleuStats::add(const BleuStats& other) {
    for (std::size_t n = 0; n < 4; ++n) {
        matches[n] += other.matches[n];
        totals[n] += other.totals[n];
    }
    hyp_length += other.hyp_length;
    ref_length += other.ref_length;
}

BleuStats bleu_sentence_stats(std::string_view hyp, std::string_view ref) {
    const auto h = bleu_tokenize(hyp);
    const auto r = bleu_tokenize(ref);
    BleuStats stats;
    stats.hyp_length = h.size();
    stats.ref_length = r.size();
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto hc = ngram_counts<std::vector<std::string>>(h, n);
        const auto rc = ngram_counts<std::vector<std::string>>(r, n);
        stats.matches[n - 1] = clipped_matches(hc, rc);
        stats.totals[n - 1] = h.size() >= n ? h.size() - n + 1 : 0;
    }
    return stats;
}

double bleu_from_stats(const BleuStats& stats, BleuSmoothing smoothing) {
    if (stats.hyp_length == 0) return 0.0;
    double log_precision = 0.0;
    for (std::size_t n = 0; n < 4; ++n) {
        double p;
        if (smoothing == BleuSmoothing::AddOne) {
            p = (static_cast<double>(stats.matches[n]) + 1.0) / (static_cast<double>(stats.totals[n]) + 1.0);
        } else {
            if (stats.totals[n] == 0 || stats.matches[n] == 0) return 0.0;
            p = static_cast<double>(stats.matches[n]) / static_cast<double>(stats.totals[n]);
        }
        log_precision += std::log(p) / 4.0;
    }
    const double c = static_cast<double>(stats.hyp_length);
    const double r = static_cast<double>(stats.ref_length);
    const double brevity = c < r ? std::exp(1.0 - r / c) : 1.0;
    return 100.0 * brevity * std::exp(log_precision);
}

double corpus_bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                   BleuSmoothing smoothing) {
    require_corpus(hyps.size(), refs.size());
    BleuStats total;
    for (std::size_t i = 0; i < hyps.size(); ++i) total.add(bleu_sentence_stats(hyps[i], refs[i]));
    return bleu_from_stats(total, smoothing);
}

double chrf2(const std::vector<std::string>& hyps, const std::vector<std::string>& refs) {
    require_corpus(hyps.size(), refs.size());
    constexpr std::size_t kOrders = 6;
    constexpr double kBeta2 = 4.0;
    std::array<std::size_t, kOrders> matched{}, hyp_total{}, ref_total{};
    auto strip = [](std::string_view s) {
        std::vector<char32_t> out;
        for (char32_t cp : utf8_decode(s)) {
            if (cp != U' ' && cp != U'\t' && cp != U'\n' && cp != U'\r') out.push_back(cp);
        }
        return out;
    };
    for (std::size_t i = 0; i < hyps.size(); ++i) {
        const auto h = strip(hyps[i]);
        const auto r = strip(refs[i]);
        for (std::size_t n = 1; n <= kOrders; ++n) {
            const auto hc = ngram_counts<std::u32string>(h, n);
            const auto rc = ngram_counts<std::u32string>(r, n);
            matched[n - 1] += clipped_matches(hc, rc);
            hyp_total[n - 1] += h.size() >= n ? h.size() - n + 1 : 0;
            ref_total[n - 1] += r.size() >= n ? r.size() - n + 1 : 0;
        }
    }
    double sum = 0.0;
    std::size_t orders = 0;
    for (std::size_t n = 0; n < kOrders; ++n) {
        if (ref_total[n] == 0) continue;
        ++orders;
        const double p = hyp_total[n] ? static_cast<double>(matched[n]) / static_cast<double>(hyp_total[n]) : 0.0;
        const double r = static_cast<double>(matched[n]) / static_cast<double>(ref_total[n]);
        const double denom = kBeta2 * p + r;
        sum += denom > 0.0 ? (1.0 + kBeta2) * p * r / denom : 0.0;
    }
    return orders ? 100.0 * sum / static_cast<double>(orders) : 0.0;
}

double harmonic_mean(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

std::map<Phenomenon, PrfScore> tag_prf(const std::vector<TagSpan>& hyp_tags, const std::vector<TagSpan>& ref_tags) {
    using Bag = std::map<std::size_t, std::map<std::string, std::size_t>>;
    std::map<Phenomenon, PrfScore> out;
    for (auto phenomenon : kPhenomena) {
        Bag hyp, ref;
        PrfScore score;
        for (const auto& t : hyp_tags) {
            if (t.phenomenon != phenomenon) continue;
            ++hyp[t.sentence_index][t.surface];
            ++score.hyp_tags;
        }
        for (const auto& t : ref_tags) {
            if (t.phenomenon != phenomenon) continue;
            ++ref[t.sentence_index][t.surface];
            ++score.ref_tags;
        }
        for (const auto& [sentence, surfaces] : hyp) {
            if (auto it = ref.find(sentence); it != ref.end()) score.matched += clipped_matches(surfaces, it->second);
        }
        if (score.hyp_tags == 0 && score.ref_tags == 0) {
            score.precision = score.recall = score.f1 = 1.0;
        } else {
            score.precision = score.hyp_tags ? static_cast<double>(score.matched) / static_cast<double>(score.hyp_tags) : 0.0;
            score.recall = score.ref_tags ? static_cast<double>(score.matched) / static_cast<double>(score.ref_tags) : 0.0;
            score.f1 = harmonic_mean(score.precision, score.recall);
        }
        out[phenomenon] = score;
    }
    return out;
}

MetricReport evaluate(const EvalInputs& inputs, const TagLexicons& lexicons, BleuSmoothing smoothing) {
    if (inputs.hyps.size() != inputs.refs.size()) {
        throw Error(ErrorCode::LengthMismatch, "hypothesis and reference corpora differ in document count");
    }
    if (!inputs.sources.empty() && inputs.sources.size() != inputs.refs.size()) {
        throw Error(ErrorCode::LengthMismatch, "source corpus differs in document count");
    }
    MetricReport report;
    std::vector<std::string> hyps, refs;
    std::vector<TagSpan> hyp_tags, ref_tags;
    std::size_t offset = 0;
    for (std::size_t d = 0; d < inputs.hyps.size(); ++d) {
        const auto& h = inputs.hyps[d];
        const auto& r = inputs.refs[d];
        if (h.size() != r.size()) throw Error(ErrorCode::LengthMismatch, "document lengths differ", r.doc_id);
        std::optional<Document> src;
        if (!inputs.sources.empty()) src = inputs.sources[d];
        for (std::size_t i = 0; i < h.size(); ++i) {
            hyps.push_back(h.sentences[i].text);
            refs.push_back(r.sentences[i].text);
            report.hyp_tokens += h.sentences[i].token_count;
            report.ref_tokens += r.sentences[i].token_count;
        }
        for (auto tag : tag_document(h, src, lexicons)) {
            tag.sentence_index += offset;
            hyp_tags.push_back(std::move(tag));
        }
        for (auto tag : tag_document(r, src, lexicons)) {
            tag.sentence_index += offset;
            ref_tags.push_back(std::move(tag));
        }
        offset += h.size();
    }
    report.sentences = hyps.size();
    report.bleu = corpus_bleu(hyps, refs, smoothing);
    report.chrf2 = chrf2(hyps, refs);
    report.tags = tag_prf(hyp_tags, ref_tags);
    return report;
}

json to_json(const MetricReport& report) {
    json tags = json::object();
    std::size_t hyp_tag_total = 0;
    std::size_t ref_tag_total = 0;
    for (const auto& [phenomenon, s] : report.tags) {
        tags[std::string(to_string(phenomenon))] = {{"p", s.precision}, {"r", s.recall}, {"f1", s.f1},
                                                    {"matched", s.matched}, {"hyp_tags", s.hyp_tags},
                                                    {"ref_tags", s.ref_tags}};
        hyp_tag_total += s.hyp_tags;
        ref_tag_total += s.ref_tags;
    }
    json out{{"bleu", report.bleu},
             {"chrf2", report.chrf2},
             {"tags", std::move(tags)},
             {"counts",
              {{"sentences", report.sentences},
               {"hyp_tokens", report.hyp_tokens},
               {"ref_tokens", report.ref_tokens},
               {"hyp_tags", hyp_tag_total},
               {"ref_tags", ref_tag_total}}}};
    out["comet"] = report.comet ? json(*report.comet) : json(nullptr);
    return out;
}

}  // namespace docape
