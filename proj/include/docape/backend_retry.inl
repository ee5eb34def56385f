#pragma once

#include "docape/error.hpp"

#include <thread>

namespace docape {

template <typename Fn>
auto with_retries(const RetryPolicy& policy, Fn&& fn) -> decltype(fn()) {
    for (int attempt = 0;; ++attempt) {
        try {
            return fn();
        } catch (const Error& e) {
            if (!is_transient(e.code()) || attempt >= policy.max_retries) throw;
            const auto delay = policy.delay_for(attempt);
            if (policy.sleep) {
                policy.sleep(delay);
            } else {
                std::this_thread::sleep_for(delay);
            }
        }
    }
}

}  // namespace docape
