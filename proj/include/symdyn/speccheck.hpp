#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "symdyn/potential.hpp"
#include "symdyn/subshift.hpp"
#include "symdyn/thermo.hpp"

namespace symdyn {

enum class GlueStrategy { Exhaustive, ZeroGlue, FactorGlue };
std::string to_string(GlueStrategy s);
GlueStrategy parse_glue_strategy(const std::string& s);

struct GapSearchOptions {
    std::uint64_t budget = 100'000'000;     // search nodes, across the whole row
    std::uint64_t pair_cutoff = 50'000'000;  // above this many pairs, sample
    std::uint64_t sample_size = 100'000;
    std::uint64_t seed = 1;
    std::optional<std::int64_t> f_declared;
    const SturmianFactorSet* factors = nullptr;  // filler words for FactorGlue
};

struct GapCounterexample {
    Word v, w;
    std::int64_t m = 0;  // failing gap (specification) or the declared bound (transitivity)
};

struct GapRow {
    std::int64_t n = 0;
    GapMode mode = GapMode::Specification;
    std::int64_t m_max = 0;
    std::optional<std::int64_t> f_declared;
    std::optional<std::int64_t> f_empirical;  // nullopt when the horizon was exhausted
    Word witness_v, witness_u, witness_w;     // worst pair and its glue (or the stuck pair)
    std::optional<GapCounterexample> counterexample;
    std::uint64_t pairs_total = 0;
    std::uint64_t pairs_checked = 0;
    bool sampled = false;
    std::uint64_t nodes = 0;

    bool exhausted() const { return !f_empirical.has_value(); }
    bool declared_holds() const { return !counterexample.has_value() && !exhausted(); }
};

/// Gluing search over pairs (v, w) of L_n.
/// Transitivity: f_empirical = max over pairs of the least m <= m_max with
/// some u in A^m making vuw admissible. Specification: per pair, the least m0
/// such that every m in [m0, m_max] glues.
GapRow min_gap_profile(const Subshift& spec, std::int64_t n, GapMode mode, std::int64_t m_max, GlueStrategy strategy,
                       const GapSearchOptions& options = {});

/// Some u in A^m with vuw admissible, by the given strategy.
std::optional<Word> find_glue(const Subshift& spec, SymbolView v, SymbolView w, std::int64_t m, GlueStrategy strategy,
                              const SturmianFactorSet* factors, std::uint64_t& nodes, std::uint64_t budget);

// ---------------------------------------------------------------------------

enum class Theorem { Thm4_2, Cor4_3, Thm4_4, Thm4_6, Thm5_2, Thm5_6 };
std::string to_string(Theorem t);
Theorem parse_theorem(const std::string& tag);

enum class BoundVerdict { Pass, Fail, PreconditionFail };
std::string to_string(BoundVerdict v);

struct Margin {
    std::int64_t n = 0;
    double value = 0;
    std::int64_t anchor = 0;  // n_k for per-anchor margins, else 0
};

struct BoundReport {
    Theorem tag = Theorem::Thm4_2;
    BoundVerdict verdict = BoundVerdict::Pass;
    std::vector<Margin> margins;
    double tolerance = 1e-9;
    nlohmann::ordered_json witnesses = nlohmann::ordered_json::object();
    nlohmann::ordered_json extras = nlohmann::ordered_json::object();
    std::string message;

    double min_margin() const;
};

inline constexpr double kMarginTolerance = 1e-9;

struct BdSpecOptions {
    std::optional<GapBound> declared;  // defaults to the family's ceil(2 e(n)/alpha)
    std::int64_t slack = 4;
    int triples_per_n = 200;
    GapSearchOptions search;
};

/// v 0^m w admissible for all pairs and all m in [f(n), f(n) + slack], plus
/// sampled triples v1 0^m1 v2 0^m2 v3.
BoundReport verify_bdspec(const BoundedDensityShift& bd, std::int64_t n_lo, std::int64_t n_hi,
                          const BdSpecOptions& options = {});

/// Transitivity with f(n) = 2k, k minimal with n <= n_k.
BoundReport verify_transex_gap(const SparseSturmianShift& spec, std::int64_t n_lo, std::int64_t n_hi,
                               GlueStrategy strategy = GlueStrategy::Exhaustive, const GapSearchOptions& options = {});

/// margin(n) = (n + f(n)) P - f(n) inf_phi + g(n) - lnZ_hi(n).
BoundReport verify_partition_bound_spec(const PartitionTable& table, double P, const GapBound& f,
                                        const std::vector<double>& g, double inf_phi, std::int64_t n_lo,
                                        std::int64_t n_hi);

/// Precondition f + g <= min(C ln n, n) on [M, n_hi]; then
/// margin(n) = ln D + nP + CE ln n - lnZ_hi(n) with E = P + 2 + |inf_phi - 1|, D = 9^{CE}.
BoundReport verify_partition_bound_trans(const PartitionTable& table, double P, double C, std::int64_t M,
                                         const GapBound& f, const std::vector<double>& g, double inf_phi,
                                         std::int64_t n_hi);

/// margin = iP + eps ln n_k - lnZ_hi(i) for i <= n_k, from the onset anchor on.
BoundReport verify_speccor(const PartitionTable& table, double P, const AnchorSequence& anchors, double epsilon,
                           const GapBound& f, const std::vector<double>& g, double inf_phi);

/// LHS = ln sum over w in L_n starting with A of exp(S_n phi); RHS =
/// nP/mu + ((mu-1)/mu) ln Z_n - g(n) - ln 2/mu.
BoundReport verify_measbd(const Subshift& spec, const Potential& pot, const MarkovMeasure& mm,
                          const TransferModel& model, SymbolView cylinder, std::int64_t n_lo, std::int64_t n_hi,
                          const std::vector<double>& g, double P, std::uint64_t budget);

} // namespace symdyn
