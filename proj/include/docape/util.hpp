#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace docape {

std::string sha256_hex(std::string_view data);

/// Decodes UTF-8 into code points; malformed bytes decode as U+FFFD one byte at a time.
std::vector<char32_t> utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);
std::size_t utf8_length(std::string_view text);

std::string read_file(const std::filesystem::path& path);

std::string ascii_lower(std::string_view text);
/// Lower-cases ASCII and Latin-1 capitals (enough for German umlauts).
std::string fold_case(std::string_view text);

/// Uniform draw from [0, n) by rejection; unlike std::uniform_int_distribution the
/// sequence is identical across standard libraries for a given seed.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

/// Seeded Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

/// ISO-8601 UTC timestamp with second precision.
std::string utc_timestamp();

/// Calls fn(i) for i in [0, n) on up to `parallelism` threads. The exception of the
/// lowest failing index is rethrown after every call finished.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t parallelism, Fn&& fn) {
    std::vector<std::exception_ptr> failures(n);
    auto guarded = [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    };
    const std::size_t workers = std::min(std::max<std::size_t>(parallelism, 1), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) guarded(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) guarded(i);
            });
        }
    }
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
}

}  // namespace docape
