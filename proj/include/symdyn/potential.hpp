#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "symdyn/interval.hpp"
#include "symdyn/sequence.hpp"
#include "symdyn/subshift.hpp"
#include "symdyn/word.hpp"

namespace symdyn {

enum class PotentialKind { LocallyConstant, PhiH, Level };

std::string to_string(PotentialKind k);

/// Interval-valued potential on finite blocks. eval() encloses phi(x) over
/// every point x agreeing with w, where position `center` of w is x(0).
class Potential {
public:
    virtual ~Potential() = default;

    PotentialKind kind() const { return kind_; }
    const std::string& description() const { return description_; }

    virtual Interval eval(SymbolView w, std::size_t center) const = 0;

    /// Enclosure of S_|w| phi(x) for points whose block at 0..|w|-1 is w.
    virtual Interval sum(SymbolView w) const;

    /// [inf phi, sup phi] over all points of the full shift.
    virtual Interval range() const = 0;

    /// Radius r when phi depends only on x(-r..r).
    virtual std::optional<int> radius() const { return std::nullopt; }

    /// True if phi vanishes identically.
    virtual bool is_zero() const { return false; }

protected:
    Potential(PotentialKind kind, std::string description) : kind_(kind), description_(std::move(description)) {}

    PotentialKind kind_;
    std::string description_;
};

using PotentialPtr = std::shared_ptr<const Potential>;

/// phi(x) = table[x(-r)..x(r)]; dense table indexed by the block code.
class LocallyConstantPotential final : public Potential {
public:
    LocallyConstantPotential(int alphabet_size, int radius, std::vector<double> table);

    Interval eval(SymbolView w, std::size_t center) const override;
    Interval sum(SymbolView w) const override;
    Interval range() const override { return range_; }
    std::optional<int> radius() const override { return radius_; }
    bool is_zero() const override { return range_.lo == 0 && range_.hi == 0; }

    int alphabet_size() const { return alphabet_size_; }
    double value(SymbolView block) const;
    /// min/max over the completions of a block missing `left` symbols on the
    /// left and `right` on the right.
    Interval partial(SymbolView known, int left, int right) const;

private:
    int alphabet_size_;
    int radius_;
    std::vector<double> table_;
    Interval range_;
    // envelopes_[left][right]: min/max tables over known blocks of length 2r+1-left-right
    std::vector<std::vector<std::vector<Interval>>> envelopes_;
};

/// Potentials that depend on x only through the maximal k with
/// x(-k) = ... = x(k): phi(x) = level(k), and a_inf on constant points.
/// level must be monotone in k and tend to a_inf.
class RunLevelPotential : public Potential {
public:
    Interval eval(SymbolView w, std::size_t center) const override;
    Interval sum(SymbolView w) const override;
    Interval range() const override { return range_; }

    double level(std::int64_t k) const;
    double a_inf() const { return a_inf_; }
    /// Interval for k known to lie in [k_lo, k_hi]; k_hi = nullopt means unbounded.
    Interval level_hull(std::int64_t k_lo, std::optional<std::int64_t> k_hi) const;
    /// Width on a constant block of radius n: |level(n) - a_inf|.
    double constant_block_width(std::int64_t n) const;

    /// Partial sums of |level(k) - a_inf| are not bounded on the checked horizon.
    bool non_bowen() const { return non_bowen_; }

protected:
    RunLevelPotential(PotentialKind kind, std::string description, Sequence level, double a_inf);
    void finish(std::int64_t horizon);

    Sequence level_;
    double a_inf_;
    std::optional<std::int64_t> last_;  // last index where level_ is defined
    Interval range_;
    bool non_bowen_ = false;
};

class PhiHPotential final : public RunLevelPotential {
public:
    explicit PhiHPotential(Sequence h);
    const Sequence& h() const { return h_; }

private:
    Sequence h_;
};

class LevelPotential final : public RunLevelPotential {
public:
    LevelPotential(Sequence a, double a_inf);
};

// ---------------------------------------------------------------------------

Interval eval_phi(const Potential& pot, SymbolView w, std::size_t center);
Interval partial_sum(const Potential& pot, SymbolView w);

std::shared_ptr<const LocallyConstantPotential> make_locally_constant(int alphabet_size, int radius,
                                                                      const std::map<Word, double>& values,
                                                                      double default_value = 0.0);
std::shared_ptr<const LocallyConstantPotential> make_zero_potential(int alphabet_size);
std::shared_ptr<const PhiHPotential> make_phi_h(Sequence h);
std::shared_ptr<const LevelPotential> make_level_potential(Sequence a, double a_inf);

/// Horizon used for summability and monotonicity checks of formula tables.
inline constexpr std::int64_t kPotentialHorizon = 1 << 16;

struct VarProfile {
    std::vector<double> var;  // var[n], n = 0..n_max
    std::vector<double> g;    // g[n], n = 0..2 n_max + 1
};

/// var(n) = max over admissible (2n+1)-blocks of the width of phi at the
/// block's center. Exact shortcuts are used for run-level potentials and for
/// n >= r of locally constant ones unless `force_enumeration` is set.
VarProfile variation_profile(const Potential& pot, const Subshift& spec, std::int64_t n_max, std::uint64_t budget,
                             bool force_enumeration = false);

/// g(n) = 2 * sum_{i=0}^{floor(n/2)} var(i), for n = 0..2(|var|-1)+1.
std::vector<double> g_from_var(const std::vector<double>& var);

enum class Growth { Bounded, Sublog, LogLinear, Superlog };
std::string to_string(Growth g);

struct GrowthReport {
    Growth growth = Growth::Bounded;
    double slope = 0;  // least-squares slope of g against ln n on the tail
    std::vector<std::pair<std::int64_t, double>> ratio;  // (n, g(n)/ln n) at log-spaced n
    std::string label() const;
};

/// Classification of the tail trend of g over n <= horizon (g[n] indexed by n).
GrowthReport growth_class(const std::vector<double>& g, std::int64_t horizon);

} // namespace symdyn
