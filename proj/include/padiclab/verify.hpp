#pragma once

// Named verification bundles: each id runs one statement's worth of checks
// and returns a structured report of assertions and measured constants. The
// CLI and the acceptance suite both drive this registry.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace padic {

struct VerifyOptions {
    std::optional<std::int64_t> p;
    std::optional<int> r;
    std::optional<int> n;
    std::optional<std::int64_t> j;
    std::uint64_t seed = 2024;
    bool oracle = false;  // force brute-force reference paths where they exist
};

struct VerifyReport {
    std::string lemma;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    nlohmann::ordered_json assertions = nlohmann::ordered_json::array();
    nlohmann::ordered_json constants = nlohmann::ordered_json::object();
    bool pass = true;

    nlohmann::ordered_json to_json() const;
};

const std::vector<std::string>& verify_ids();
bool is_verify_id(const std::string& id);

VerifyReport run_verify(const std::string& id, const VerifyOptions& opt = {});

}  // namespace padic
