#pragma once

#include "docape/backend.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace docape {

/// Contrastive pronoun test item: candidates differ only in the pronoun.
struct ContrastiveInstance {
    std::vector<std::string> src_context;
    /// NMT translations of src_context; translated on demand when absent.
    std::optional<std::vector<std::string>> tgt_context_hyps;
    std::string src;
    /// NMT translation of src; translated on demand when absent.
    std::optional<std::string> src_hyp;
    std::vector<std::string> candidates;
    std::size_t correct_index = 0;
};

/// Validates the instance invariants (>= 2 distinct candidates, index in range, aligned context).
void validate(const ContrastiveInstance& instance);

struct InstanceScore {
    std::size_t chosen = 0;
    std::vector<double> scores;
    /// The prompt that was scored against; kept for audit.
    std::string prompt;
};

/// Index of the highest score; ties go to the lowest index.
std::size_t argmax_first(const std::vector<double>& scores);

/// Scores each candidate as the post-edited continuation of a DocAPE prompt over the last
/// `ctx_size` context sentences plus the source. `translation` may be null when the instance
/// already carries every hypothesis needed.
InstanceScore score_instance(const ContrastiveInstance& instance, TranslationBackend* translation,
                             CompletionBackend& completion, std::size_t ctx_size);

struct BenchmarkResult {
    double accuracy = 0.0;
    std::size_t correct = 0;
    std::vector<InstanceScore> log;
};

/// EmptyBenchmark on an empty instance list.
BenchmarkResult run_benchmark(const std::vector<ContrastiveInstance>& instances, TranslationBackend* translation,
                              CompletionBackend& completion, std::size_t ctx_size, std::size_t parallelism = 1);

std::vector<ContrastiveInstance> read_instances(std::istream& in);
nlohmann::json to_json(const BenchmarkResult& result, const std::vector<ContrastiveInstance>& instances);

}  // namespace docape
