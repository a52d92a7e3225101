#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "symdyn/potential.hpp"
#include "symdyn/speccheck.hpp"
#include "symdyn/subshift.hpp"

namespace symdyn {

/// One experiment. Built from a JSON document that is first normalized
/// (defaults filled in, keys in canonical order), so serialization round-trips.
struct ExperimentConfig {
    nlohmann::ordered_json doc;  // normalized document
    std::string digest;          // SHA-256 of doc without output_dir and budget

    SubshiftPtr subshift;
    PotentialPtr potential;

    std::string name;
    std::int64_t n_max = 12;
    std::optional<std::int64_t> m_max;
    std::optional<std::size_t> state_block;
    std::int64_t anchor_horizon = 1 << 20;
    std::int64_t language_files_max = 16;

    double margin_tol = kMarginTolerance;
    double bracket_tol = 1e-9;
    double perron_tol = 1e-12;
    double identity_tol = 1e-8;
    double stationarity_tol = 1e-10;

    GlueStrategy glue = GlueStrategy::Exhaustive;
    GapMode gap_mode = GapMode::Specification;
    std::int64_t gap_n_lo = 1;
    std::int64_t gap_n_hi = 6;
    GapSearchOptions search;

    struct Verify {
        std::int64_t n_lo = 1;
        std::int64_t n_hi = 12;
        std::string P = "auto";  // auto | transfer | bracket | a number
        double C = 1.0;
        std::int64_t M_onset = 3;
        double epsilon = 0.5;
        std::vector<double> epsilons{0.9, 0.6, 0.5, 0.3};
        std::int64_t slack = 4;
        int triples_per_n = 200;
        Word cylinder;
        std::optional<GapBound> f;  // override of the family's declared bound
        std::string g = "variation";  // variation | zero
    } verify;

    std::uint64_t budget = 100'000'000;
    int threads = 1;
    std::string output_dir = "out";

    /// Declared gap bound in effect: verify.f, else the subshift's.
    std::optional<GapBound> gap_bound() const;
};

/// Validates and fills defaults. Throws InputError naming the offending key.
nlohmann::ordered_json normalize_config(const nlohmann::json& doc);

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Normalized document, including the current output_dir and budget.
nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

SubshiftPtr build_subshift(const nlohmann::ordered_json& normalized_subshift);
PotentialPtr build_potential(const nlohmann::ordered_json& normalized_potential, int alphabet_size);

std::string sha256_hex(const std::string& data);

} // namespace symdyn
