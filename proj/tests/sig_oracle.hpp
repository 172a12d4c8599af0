#pragma once

// Brute-force usage enumerator, independent of the library implementation:
// materializes every (positional prefix) x (keyword subset) combination,
// sorts by (optional count, included-name tuple) and cuts to the cap. Only
// usable for small keyword counts; that is the point.

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace testsupport {

inline std::vector<std::vector<std::string>> brute_force_usages(
    const std::vector<std::string>& required, const std::vector<std::string>& optionals,
    const std::vector<std::string>& keywords, std::size_t cap = 10) {
    std::vector<std::pair<int, std::vector<std::string>>> all;
    for (std::size_t prefix = 0; prefix <= optionals.size(); ++prefix) {
        for (std::uint32_t mask = 0; mask < (1u << keywords.size()); ++mask) {
            std::vector<std::string> included(required);
            for (std::size_t j = 0; j < prefix; ++j) included.push_back(optionals[j]);
            int kw = 0;
            for (std::size_t j = 0; j < keywords.size(); ++j) {
                if (mask >> j & 1u) {
                    included.push_back(keywords[j]);
                    ++kw;
                }
            }
            all.emplace_back(static_cast<int>(prefix) + kw, std::move(included));
        }
    }
    std::sort(all.begin(), all.end());
    if (all.size() > cap) all.resize(cap);
    std::vector<std::vector<std::string>> out;
    out.reserve(all.size());
    for (auto& [count, included] : all) out.push_back(std::move(included));
    return out;
}

} // namespace testsupport
