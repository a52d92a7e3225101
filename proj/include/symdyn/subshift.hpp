#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "symdyn/sequence.hpp"
#include "symdyn/word.hpp"

namespace symdyn {

enum class Exactness { ExactLanguage, LocallyAdmissibleSuperset };
enum class Family { Full, Sft, BoundedDensity, SparseSturmian, Product };
enum class Verdict { Admissible, Forbidden };

/// Which shadowing property a declared gap bound f(n) claims.
enum class GapMode { Specification, Transitivity };

std::string to_string(Exactness e);
std::string to_string(Family f);
std::string to_string(GapMode m);

/// Declared gap bound f(n) together with the property it is claimed for.
struct GapBound {
    GapMode mode = GapMode::Specification;
    std::function<std::int64_t(std::int64_t)> f;
    std::string description;

    std::int64_t operator()(std::int64_t n) const { return f(n); }
};

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// A subshift presented by a decidable, hereditary admissibility oracle.
class Subshift {
public:
    virtual ~Subshift() = default;

    int alphabet_size() const { return alphabet_size_; }
    Exactness exactness() const { return exactness_; }
    Family family() const { return family_; }
    const std::optional<GapBound>& declared_gap() const { return gap_; }

    /// Full admissibility check. Symbols are assumed in range.
    virtual bool admissible(SymbolView w) const = 0;

    /// Admissibility of w given that w without its last symbol is admissible:
    /// only constraints touching the last symbol need checking.
    virtual bool admissible_extension(SymbolView w) const { return admissible(w); }

    /// Copy of this subshift with a different declared gap bound.
    std::shared_ptr<const Subshift> with_declared_gap(std::optional<GapBound> gap) const;

protected:
    Subshift(int alphabet_size, Exactness exactness, Family family)
        : alphabet_size_(alphabet_size), exactness_(exactness), family_(family) {}
    Subshift(const Subshift&) = default;

    virtual std::shared_ptr<Subshift> clone() const = 0;

    int alphabet_size_;
    Exactness exactness_;
    Family family_;
    std::optional<GapBound> gap_;
};

using SubshiftPtr = std::shared_ptr<const Subshift>;

// ---------------------------------------------------------------------------
// Families

class FullShift final : public Subshift {
public:
    explicit FullShift(int alphabet_size);
    bool admissible(SymbolView) const override { return true; }
    bool admissible_extension(SymbolView) const override { return true; }

private:
    std::shared_ptr<Subshift> clone() const override { return std::make_shared<FullShift>(*this); }
};

/// Shift of finite type. The oracle decides membership in the true language:
/// the block graph of locally admissible words is trimmed to its bi-infinite
/// core, so dead-end words are Forbidden.
class SftShift final : public Subshift {
public:
    SftShift(int alphabet_size, std::vector<Word> forbidden);

    bool admissible(SymbolView w) const override;
    bool admissible_extension(SymbolView w) const override;

    const std::vector<Word>& forbidden() const { return forbidden_; }
    std::size_t memory() const { return memory_; }

private:
    std::shared_ptr<Subshift> clone() const override { return std::make_shared<SftShift>(*this); }
    bool locally_admissible(SymbolView w) const;

    std::vector<Word> forbidden_;
    std::size_t memory_ = 1;
    std::vector<std::uint64_t> live_edges_;  // sorted codes of (memory+1)-blocks
    std::vector<std::vector<std::uint64_t>> short_words_;  // sorted codes by length < memory+1
};

struct BoundedDensityParams {
    int k = 1;
    std::int64_t n_max = 0;
    std::vector<std::int64_t> h;       // h[0] = 0, h[1..n_max]
    Rational alpha;                    // min over stored n of h(n)/n
    std::vector<std::int64_t> e_num;   // e(n) * alpha.den, e(n) = h(n) - n alpha
    std::vector<std::int64_t> e_env;   // running max of e_num
    bool e_increasing = true;          // e_num non-decreasing on the stored range
    std::string h_description;

    double e(std::int64_t n) const;
    /// ceil(2 e_env(n) / alpha): the gap bound of the zero-padding gluing.
    std::int64_t gap_bound(std::int64_t n) const;
    /// 2 h(n) - h(2n), for n <= n_max / 2. Equals 2e(n) - e(2n) for every
    /// alpha, so it tracks the growth of e without estimating the gradient.
    std::int64_t doubling_defect(std::int64_t n) const;
};

class BoundedDensityShift final : public Subshift {
public:
    explicit BoundedDensityShift(BoundedDensityParams params);

    bool admissible(SymbolView w) const override;
    bool admissible_extension(SymbolView w) const override;

    const BoundedDensityParams& params() const { return params_; }

private:
    std::shared_ptr<Subshift> clone() const override { return std::make_shared<BoundedDensityShift>(*this); }
    void check_length(std::size_t len) const;

    BoundedDensityParams params_;
};

/// Factors of the mechanical word of slope p/q, lengths 0..k_max+1.
class SturmianFactorSet {
public:
    SturmianFactorSet() = default;
    SturmianFactorSet(std::int64_t p, std::int64_t q, int k_max, std::vector<std::vector<Word>> factors);

    std::int64_t p() const { return p_; }
    std::int64_t q() const { return q_; }
    int k_max() const { return k_max_; }
    /// Longest length stored (k_max + 1).
    int stored_length() const { return k_max_ + 1; }

    const std::vector<Word>& factors(int k) const;
    bool contains(SymbolView w) const;
    /// Membership by base-2 code of a length-k word.
    bool contains_code(int k, std::uint64_t code) const;

private:
    std::int64_t p_ = 0, q_ = 1;
    int k_max_ = 0;
    std::vector<std::vector<Word>> factors_;
    std::vector<std::vector<std::uint64_t>> codes_;
    std::vector<std::vector<std::uint8_t>> tables_;  // indexed by code, short lengths only
};

class SparseSturmianShift final : public Subshift {
public:
    SparseSturmianShift(SturmianFactorSet fs, std::vector<std::int64_t> n_seq);

    bool admissible(SymbolView w) const override;
    bool admissible_extension(SymbolView w) const override;

    const SturmianFactorSet& factor_set() const { return fs_; }
    const std::vector<std::int64_t>& n_seq() const { return n_seq_; }
    /// Window length n_j + 2j for j = 1..horizon.
    std::int64_t window(int j) const { return n_seq_[static_cast<std::size_t>(j - 1)] + 2 * j; }
    int horizon() const { return static_cast<int>(n_seq_.size()); }
    /// Smallest k with n <= n_k; nullopt beyond the last n_k.
    std::optional<int> level_for(std::int64_t n) const;

private:
    std::shared_ptr<Subshift> clone() const override { return std::make_shared<SparseSturmianShift>(*this); }
    bool window_has_factor(SymbolView w, std::size_t start, int j) const;

    SturmianFactorSet fs_;
    std::vector<std::int64_t> n_seq_;
};

class ProductShift final : public Subshift {
public:
    ProductShift(SubshiftPtr a, SubshiftPtr b);

    bool admissible(SymbolView w) const override;
    bool admissible_extension(SymbolView w) const override;

    const SubshiftPtr& first() const { return a_; }
    const SubshiftPtr& second() const { return b_; }
    Symbol pair(Symbol x, Symbol y) const { return static_cast<Symbol>(x * b_->alphabet_size() + y); }
    void project(SymbolView w, std::vector<Symbol>& first, std::vector<Symbol>& second) const;

private:
    std::shared_ptr<Subshift> clone() const override { return std::make_shared<ProductShift>(*this); }

    SubshiftPtr a_, b_;
};

// ---------------------------------------------------------------------------
// Operations

/// Verdict for w. Throws InputError when a symbol is out of range.
Verdict word_admissible(const Subshift& spec, SymbolView w);

/// Visits every admissible word of length n in lexicographic order by
/// depth-first extension with hereditary pruning. Each attempted extension
/// counts as one node; exceeding `budget` throws BudgetExhausted.
/// Returns the number of nodes used.
std::uint64_t for_each_word(const Subshift& spec, std::size_t n, std::uint64_t budget,
                            const std::function<void(SymbolView)>& visit);

WordList enumerate_language(const Subshift& spec, std::size_t n, std::uint64_t budget);
std::uint64_t count_language(const Subshift& spec, std::size_t n, std::uint64_t budget);

SubshiftPtr make_full_shift(int alphabet_size);
SubshiftPtr make_sft(int alphabet_size, std::vector<Word> forbidden);
SubshiftPtr make_golden_mean();

/// Bounded density shift on {0..k}. h is materialized on 1..n_max and
/// validated (non-decreasing, subadditive on the stored range).
std::shared_ptr<const BoundedDensityShift> make_bounded_density(int k, const Sequence& h, std::int64_t n_max);

SturmianFactorSet make_sturmian_factors(std::int64_t p, std::int64_t q, int k_max);

std::shared_ptr<const SparseSturmianShift> make_sparse_sturmian(SturmianFactorSet fs,
                                                                std::vector<std::int64_t> n_seq);

SubshiftPtr product_subshift(SubshiftPtr a, SubshiftPtr b);

} // namespace symdyn
