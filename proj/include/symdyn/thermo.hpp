#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "symdyn/potential.hpp"
#include "symdyn/subshift.hpp"

namespace symdyn {

struct PartitionRow {
    std::int64_t n = 0;
    std::uint64_t count = 0;
    double lnZ_lo = 0;
    double lnZ_hi = 0;
};

/// Rows for n = 1..n_max. `upper_bound_only` marks tables built from a
/// locally admissible superset of the language.
struct PartitionTable {
    std::vector<PartitionRow> rows;
    bool upper_bound_only = false;

    std::int64_t n_max() const { return static_cast<std::int64_t>(rows.size()); }
    const PartitionRow& at(std::int64_t n) const;
};

/// ln Z_n = ln sum_{w in L_n} exp(S_n phi(w)), enclosed by outward rounding.
PartitionRow partition_function(const Subshift& spec, const Potential& pot, std::int64_t n, std::uint64_t budget);
PartitionTable partition_table(const Subshift& spec, const Potential& pot, std::int64_t n_max, std::uint64_t budget);

struct BracketRow {
    std::int64_t n = 0;
    std::int64_t f = 0;
    double g = 0;
    double lo = 0;  // -inf when no lower bound is available
    double hi = 0;
};

struct PressureBracket {
    std::vector<BracketRow> rows;
    double best_lo = 0;
    double best_hi = 0;
    std::int64_t best_lo_n = 0;
    std::int64_t best_hi_n = 0;
    bool consistent = true;
    bool upper_bound_only = false;
    std::string f_description;

    double width() const { return best_hi - best_lo; }
};

/// lo(n) = (lnZ_lo(n) + inf_phi f(n) - g(n)) / (n + f(n)) from the
/// specification upper bound on Z; hi(n) = min_{m <= n} lnZ_hi(m)/m.
/// Without a specification-mode gap bound, or for superset tables, only the
/// upper bound is produced. g is indexed by n and must cover the horizon.
PressureBracket pressure_bracket(const PartitionTable& table, const std::optional<GapBound>& f,
                                 const std::vector<double>& g, double inf_phi, double tolerance = 1e-9);

/// Throws InconsistencyError describing the crossing when !consistent.
void ensure_consistent(const PressureBracket& bracket);

// ---------------------------------------------------------------------------

/// Weighted block graph: states are L_{n_state}, an edge u -> v joins u and v
/// overlapping in n_state - 1 symbols into an admissible (n_state+1)-word,
/// with weight exp(phi) at position r of that word.
struct TransferModel {
    int alphabet_size = 0;
    std::size_t n_state = 0;
    int radius = 0;
    std::vector<std::uint64_t> state_codes;  // sorted
    std::vector<std::size_t> row_ptr;        // CSR by source state
    std::vector<std::uint32_t> col;
    std::vector<double> phi;                 // potential value on the edge
    std::vector<double> weight;              // exp(phi)

    std::size_t states() const { return state_codes.size(); }
    std::size_t edges() const { return col.size(); }
    std::optional<std::size_t> state_index(SymbolView block) const;
    Word state_word(std::size_t i) const;
    /// Dense weighted matrix (small models only).
    std::vector<std::vector<double>> dense() const;
};

TransferModel build_transfer(const Subshift& spec, const Potential& pot, std::size_t n_state, std::uint64_t budget);

/// Strongly connected components in a deterministic order.
std::vector<std::vector<std::size_t>> strongly_connected_components(const TransferModel& model);

struct PerronResult {
    double lambda = 0;
    std::vector<double> left;
    std::vector<double> right;  // <left, right> = 1
    double residual = 0;        // ||M r - lambda r||_inf with ||r||_inf = 1 before pairing
    double left_residual = 0;
    int iterations = 0;
    double shift = 0;
};

/// Power iteration from the uniform vector with inf-norm normalization.
/// Periodic graphs are iterated on M + sigma I.
PerronResult perron(const TransferModel& model, double tol = 1e-12, int max_iter = 200000);

struct MarkovMeasure {
    std::vector<double> pi;  // stationary distribution over states
    std::vector<double> p;   // transition probabilities, aligned with model edges
    double lambda = 0;
    double entropy = 0;
    double phi_integral = 0;
    double identity_error = 0;      // |entropy + phi_integral - ln lambda|
    double stationarity_error = 0;  // ||pi p - pi||_1
};

MarkovMeasure markov_equilibrium(const TransferModel& model, const PerronResult& pr, double identity_tol = 1e-8,
                                 double stationarity_tol = 1e-10);

/// mu([A]) for the cylinder of A at coordinate 0.
double cylinder_measure(const MarkovMeasure& mm, const TransferModel& model, SymbolView a);

// ---------------------------------------------------------------------------

struct Anchor {
    double epsilon = 0;
    std::int64_t n = 0;
    double score = 0;
};

struct AnchorSequence {
    std::vector<Anchor> anchors;
    bool witnessed() const { return !anchors.empty(); }
};

/// For each epsilon in turn, the smallest n >= 3 beyond the previous anchor
/// with (f(n) + g(n)) / ln n <= min(epsilon, previous score). Stops at the
/// first epsilon with no such n up to the horizon.
AnchorSequence anchor_sequence(const std::function<double(std::int64_t)>& f,
                               const std::function<double(std::int64_t)>& g, std::int64_t horizon,
                               const std::vector<double>& epsilons);

} // namespace symdyn
