#include "docape/error.hpp"
#include "docape/text.hpp"

#include "support.hpp"

#include <doctest.h>

#include <numeric>

using namespace docape;

TEST_SUITE("text") {

TEST_CASE("token counting is whitespace based") {
    CHECK(count_tokens("") == 0);
    CHECK(count_tokens("   ") == 0);
    CHECK(count_tokens("a") == 1);
    CHECK(count_tokens("  Das ist\tein  Satz.\n") == 4);
}

TEST_CASE("sanitize defuses separators and newlines") {
    CHECK(sanitize("a <SS> b") == "a < SS > b");
    CHECK(sanitize("line one\nline two") == "line one line two");
    CHECK(sanitize("  padded  ") == "padded");
    CHECK(sanitize("<SS><SS>") == "< SS >< SS >");
    const auto s = Sentence::from("x\r\ny <SS>");
    CHECK(s.text.find("<SS>") == std::string::npos);
    CHECK(s.text.find('\n') == std::string::npos);
    CHECK(s.token_count == count_tokens(s.text));
}

TEST_CASE("make_document validates") {
    CHECK_THROWS_AS(make_document("", {"a"}), Error);
    CHECK_THROWS_AS(make_document("d", {}), Error);
    try {
        make_document("d", {});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyField);
    }
    const auto doc = make_document("d", {"one two", "three"});
    CHECK(doc.size() == 2);
    CHECK(doc.token_counts() == std::vector<std::size_t>{2, 1});
}

TEST_CASE("chunking packs greedily under the limit") {
    const std::vector<std::size_t> counts{3, 3, 3, 10, 1};
    const auto ranges = chunk_token_counts(counts, 6);
    REQUIRE(ranges.size() == 4);
    CHECK(ranges[0] == IndexRange{0, 2});
    CHECK(ranges[1] == IndexRange{2, 3});
    CHECK(ranges[2] == IndexRange{3, 4});
    CHECK(ranges[3] == IndexRange{4, 5});
}

TEST_CASE("oversized sentence gets its own chunk") {
    const std::vector<std::size_t> counts{2, 300, 2};
    const auto ranges = chunk_token_counts(counts, 256);
    REQUIRE(ranges.size() == 3);
    CHECK(ranges[1] == IndexRange{1, 2});
}

TEST_CASE("chunk invariants hold on random documents") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const auto doc = testing::random_document(rng, "d" + std::to_string(trial), 60, 40);
        const auto counts = doc.token_counts();
        for (std::size_t limit : {std::size_t{256}, std::size_t{1024}, std::size_t{17}}) {
            const auto chunks = chunk_document(doc, limit);
            std::size_t expected_start = 0;
            for (std::size_t c = 0; c < chunks.size(); ++c) {
                const auto& ch = chunks[c];
                CHECK(ch.doc_id == doc.doc_id);
                REQUIRE(ch.range.start == expected_start);
                REQUIRE(ch.range.end > ch.range.start);
                const auto sum = std::accumulate(counts.begin() + ch.range.start, counts.begin() + ch.range.end,
                                                 std::size_t{0});
                CHECK(ch.source_tokens == sum);
                if (ch.range.size() > 1) CHECK(sum <= limit);
                if (c + 1 < chunks.size()) CHECK(sum + counts[ch.range.end] > limit);
                expected_start = ch.range.end;
            }
            CHECK(expected_start == doc.size());
        }
    }
}

TEST_CASE("left context window is the largest fitting suffix") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto doc = testing::random_document(rng, "d", 30, 50);
        const auto counts = doc.token_counts();
        for (std::size_t i = 0; i < doc.size(); ++i) {
            const auto w = left_context_window(counts, i, 64);
            REQUIRE(w.end == i + 1);
            REQUIRE(w.start <= i);
            const auto sum = std::accumulate(counts.begin() + w.start, counts.begin() + w.end, std::size_t{0});
            if (w.size() > 1) CHECK(sum <= 64);
            if (w.start > 0 && counts[i] <= 64) CHECK(sum + counts[w.start - 1] > 64);
        }
    }
}

TEST_CASE("separator split and join") {
    CHECK(join_with_separator(std::vector<std::string>{"a", "b c"}) == "a <SS> b c");
    CHECK(split_on_separator("a <SS> b c") == std::vector<std::string>{"a", "b c"});
    CHECK(split_on_separator("a <SS> b <SS> ") == std::vector<std::string>{"a", "b"});
    CHECK(split_on_separator("a<SS>b") == std::vector<std::string>{"a", "b"});
}

}
