#include "symdyn/subshift.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "symdyn/error.hpp"

namespace symdyn {

std::string to_string(Exactness e) {
    return e == Exactness::ExactLanguage ? "exact_language" : "locally_admissible_superset";
}

std::string to_string(Family f) {
    switch (f) {
    case Family::Full: return "full";
    case Family::Sft: return "sft";
    case Family::BoundedDensity: return "bounded_density";
    case Family::SparseSturmian: return "sparse_sturmian";
    case Family::Product: return "product";
    }
    return "?";
}

std::string to_string(GapMode m) { return m == GapMode::Specification ? "specification" : "transitivity"; }

std::shared_ptr<const Subshift> Subshift::with_declared_gap(std::optional<GapBound> gap) const {
    auto copy = clone();
    copy->gap_ = std::move(gap);
    return copy;
}

// ---------------------------------------------------------------------------

FullShift::FullShift(int alphabet_size) : Subshift(alphabet_size, Exactness::ExactLanguage, Family::Full) {
    if (alphabet_size < 1 || alphabet_size > 36) throw ConstructionError("full shift alphabet size must be in 1..36");
    gap_ = GapBound{GapMode::Specification, [](std::int64_t) { return std::int64_t{0}; }, "0"};
}

// ---------------------------------------------------------------------------

namespace {

bool sorted_contains(const std::vector<std::uint64_t>& v, std::uint64_t code) {
    return std::binary_search(v.begin(), v.end(), code);
}

} // namespace

SftShift::SftShift(int alphabet_size, std::vector<Word> forbidden)
    : Subshift(alphabet_size, Exactness::ExactLanguage, Family::Sft), forbidden_(std::move(forbidden)) {
    if (alphabet_size < 1 || alphabet_size > 36) throw ConstructionError("SFT alphabet size must be in 1..36");
    std::size_t longest = 1;
    for (const auto& f : forbidden_) {
        if (f.empty()) throw ConstructionError("SFT forbidden word must be nonempty");
        check_symbols(f, alphabet_size);
        longest = std::max(longest, f.size());
    }
    memory_ = std::max<std::size_t>(1, longest - 1);
    const std::size_t block = memory_ + 1;
    if (!code_fits(alphabet_size, block) || std::pow(alphabet_size, block) > double(1 << 24))
        throw ConstructionError("SFT block graph too large for desk-scale trimming");

    // Vertices: locally admissible memory-blocks; edges: locally admissible (memory+1)-blocks.
    const auto a = static_cast<std::uint64_t>(alphabet_size);
    std::uint64_t vertex_count = 1;
    for (std::size_t i = 0; i < memory_; ++i) vertex_count *= a;
    std::vector<char> alive(vertex_count, 0);
    std::vector<Symbol> buf(block);
    for (std::uint64_t v = 0; v < vertex_count; ++v) {
        decode(v, alphabet_size, std::span<Symbol>(buf).first(memory_));
        alive[v] = locally_admissible(SymbolView(buf).first(memory_));
    }
    std::vector<char> edge_ok(vertex_count * a, 0);
    for (std::uint64_t e = 0; e < vertex_count * a; ++e) {
        decode(e, alphabet_size, buf);
        edge_ok[e] = locally_admissible(buf);
    }
    // Trim vertices without a live successor or predecessor until stable.
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<char> has_out(vertex_count, 0), has_in(vertex_count, 0);
        for (std::uint64_t e = 0; e < vertex_count * a; ++e) {
            if (!edge_ok[e]) continue;
            std::uint64_t from = e / a, to = e % vertex_count;
            if (alive[from] && alive[to]) {
                has_out[from] = 1;
                has_in[to] = 1;
            }
        }
        for (std::uint64_t v = 0; v < vertex_count; ++v) {
            if (alive[v] && !(has_out[v] && has_in[v])) {
                alive[v] = 0;
                changed = true;
            }
        }
    }
    for (std::uint64_t e = 0; e < vertex_count * a; ++e) {
        if (edge_ok[e] && alive[e / a] && alive[e % vertex_count]) live_edges_.push_back(e);
    }
    // Words shorter than a full block: subwords of live edges.
    short_words_.assign(block, {});
    std::vector<std::set<std::uint64_t>> shorts(block);
    for (std::uint64_t e : live_edges_) {
        decode(e, alphabet_size, buf);
        for (std::size_t len = 1; len < block; ++len)
            for (std::size_t s = 0; s + len <= block; ++s) shorts[len].insert(encode(SymbolView(buf).subspan(s, len), alphabet_size));
    }
    for (std::size_t len = 0; len < block; ++len) short_words_[len].assign(shorts[len].begin(), shorts[len].end());
}

bool SftShift::locally_admissible(SymbolView w) const {
    for (const auto& f : forbidden_) {
        if (f.size() > w.size()) continue;
        if (std::search(w.begin(), w.end(), f.view().begin(), f.view().end()) != w.end()) return false;
    }
    return true;
}

bool SftShift::admissible(SymbolView w) const {
    const std::size_t block = memory_ + 1;
    if (w.empty()) return true;
    if (w.size() < block) return sorted_contains(short_words_[w.size()], encode(w, alphabet_size_));
    for (std::size_t s = 0; s + block <= w.size(); ++s)
        if (!sorted_contains(live_edges_, encode(w.subspan(s, block), alphabet_size_))) return false;
    return true;
}

bool SftShift::admissible_extension(SymbolView w) const {
    const std::size_t block = memory_ + 1;
    if (w.size() <= block) return admissible(w);
    return sorted_contains(live_edges_, encode(w.last(block), alphabet_size_));
}

// ---------------------------------------------------------------------------

double BoundedDensityParams::e(std::int64_t n) const {
    return static_cast<double>(e_num.at(static_cast<std::size_t>(n))) / static_cast<double>(alpha.den);
}

std::int64_t BoundedDensityParams::gap_bound(std::int64_t n) const {
    if (n < 0 || n > n_max)
        throw InputError(fmt::format("bounded density gap bound requested at n={} beyond stored range {}", n, n_max));
    // 2 e / alpha = 2 e_num / alpha.num
    std::int64_t numer = 2 * e_env[static_cast<std::size_t>(n)];
    return (numer + alpha.num - 1) / alpha.num;
}

std::int64_t BoundedDensityParams::doubling_defect(std::int64_t n) const {
    if (n < 1 || 2 * n > n_max)
        throw InputError(fmt::format("doubling defect needs h up to {} (stored {})", 2 * n, n_max));
    return 2 * h[static_cast<std::size_t>(n)] - h[static_cast<std::size_t>(2 * n)];
}

BoundedDensityShift::BoundedDensityShift(BoundedDensityParams params)
    : Subshift(params.k + 1, Exactness::ExactLanguage, Family::BoundedDensity), params_(std::move(params)) {
    auto p = params_;
    gap_ = GapBound{GapMode::Specification, [p](std::int64_t n) { return p.gap_bound(n); },
                    "ceil(2 e(n) / alpha)"};
}

void BoundedDensityShift::check_length(std::size_t len) const {
    if (static_cast<std::int64_t>(len) > params_.n_max)
        throw InputError(fmt::format("bounded density h is stored only up to {}, word has length {}", params_.n_max, len));
}

bool BoundedDensityShift::admissible(SymbolView w) const {
    check_length(w.size());
    const auto& h = params_.h;
    std::vector<std::int64_t> prefix(w.size() + 1, 0);
    for (std::size_t i = 0; i < w.size(); ++i) prefix[i + 1] = prefix[i] + w[i];
    for (std::size_t len = 1; len <= w.size(); ++len) {
        for (std::size_t s = 0; s + len <= w.size(); ++s)
            if (prefix[s + len] - prefix[s] > h[len]) return false;
    }
    return true;
}

bool BoundedDensityShift::admissible_extension(SymbolView w) const {
    check_length(w.size());
    const auto& h = params_.h;
    std::int64_t sum = 0;
    for (std::size_t len = 1; len <= w.size(); ++len) {
        sum += w[w.size() - len];
        if (sum > h[len]) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

SturmianFactorSet::SturmianFactorSet(std::int64_t p, std::int64_t q, int k_max, std::vector<std::vector<Word>> factors)
    : p_(p), q_(q), k_max_(k_max), factors_(std::move(factors)) {
    codes_.resize(factors_.size());
    for (std::size_t k = 0; k < factors_.size(); ++k) {
        for (const auto& f : factors_[k]) codes_[k].push_back(encode(f, 2));
        std::sort(codes_[k].begin(), codes_[k].end());
    }
    tables_.resize(factors_.size());
    for (std::size_t k = 0; k < factors_.size() && k <= 20; ++k) {
        tables_[k].assign(std::size_t{1} << k, 0);
        for (auto c : codes_[k]) tables_[k][c] = 1;
    }
}

bool SturmianFactorSet::contains_code(int k, std::uint64_t code) const {
    const auto kk = static_cast<std::size_t>(k);
    if (!tables_[kk].empty()) return tables_[kk][code] != 0;
    return sorted_contains(codes_[kk], code);
}

const std::vector<Word>& SturmianFactorSet::factors(int k) const {
    if (k < 0 || k > stored_length())
        throw InputError(fmt::format("Sturmian factors stored only up to length {}", stored_length()));
    return factors_[static_cast<std::size_t>(k)];
}

bool SturmianFactorSet::contains(SymbolView w) const {
    if (static_cast<int>(w.size()) > stored_length())
        throw InputError(fmt::format("Sturmian factor query of length {} beyond stored length {}", w.size(), stored_length()));
    return contains_code(static_cast<int>(w.size()), encode(w, 2));
}

// ---------------------------------------------------------------------------

SparseSturmianShift::SparseSturmianShift(SturmianFactorSet fs, std::vector<std::int64_t> n_seq)
    : Subshift(2, Exactness::LocallyAdmissibleSuperset, Family::SparseSturmian),
      fs_(std::move(fs)), n_seq_(std::move(n_seq)) {
    auto seq = n_seq_;
    gap_ = GapBound{GapMode::Transitivity,
                    [seq](std::int64_t n) -> std::int64_t {
                        for (std::size_t k = 0; k < seq.size(); ++k)
                            if (n <= seq[k]) return 2 * static_cast<std::int64_t>(k + 1);
                        throw InputError(fmt::format("gap bound 2k undefined for n={} beyond n_k={}", n, seq.back()));
                    },
                    "2k, k minimal with n <= n_k"};
}

std::optional<int> SparseSturmianShift::level_for(std::int64_t n) const {
    for (std::size_t k = 0; k < n_seq_.size(); ++k)
        if (n <= n_seq_[k]) return static_cast<int>(k + 1);
    return std::nullopt;
}

bool SparseSturmianShift::window_has_factor(SymbolView w, std::size_t start, int j) const {
    const auto len = static_cast<std::size_t>(window(j));
    const auto fj = static_cast<std::size_t>(j);
    for (std::size_t i = start; i + fj <= start + len; ++i)
        if (fs_.contains(w.subspan(i, fj))) return true;
    return false;
}

bool SparseSturmianShift::admissible(SymbolView w) const {
    for (int j = 1; j <= horizon(); ++j) {
        const auto len = static_cast<std::size_t>(window(j));
        if (len > w.size()) break;
        const auto fj = static_cast<std::size_t>(j);
        // mark[i]: a j-factor starts at i; sliding count over each window.
        thread_local std::vector<int> mark;
        mark.assign(w.size() - fj + 1, 0);
        const std::uint64_t mask = (std::uint64_t{1} << fj) - 1;
        std::uint64_t code = 0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            code = ((code << 1) | w[i]) & mask;
            if (i + 1 >= fj) mark[i + 1 - fj] = fs_.contains_code(j, code) ? 1 : 0;
        }
        const std::size_t span = len - fj + 1;  // start positions inside one window
        int count = 0;
        for (std::size_t i = 0; i < span; ++i) count += mark[i];
        if (count == 0) return false;
        for (std::size_t s = 1; s + len <= w.size(); ++s) {
            count += mark[s + span - 1] - mark[s - 1];
            if (count == 0) return false;
        }
    }
    return true;
}

bool SparseSturmianShift::admissible_extension(SymbolView w) const {
    for (int j = 1; j <= horizon(); ++j) {
        const auto len = static_cast<std::size_t>(window(j));
        if (len > w.size()) break;
        if (!window_has_factor(w, w.size() - len, j)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

ProductShift::ProductShift(SubshiftPtr a, SubshiftPtr b)
    : Subshift(a->alphabet_size() * b->alphabet_size(),
               (a->exactness() == Exactness::ExactLanguage && b->exactness() == Exactness::ExactLanguage)
                   ? Exactness::ExactLanguage
                   : Exactness::LocallyAdmissibleSuperset,
               Family::Product),
      a_(std::move(a)), b_(std::move(b)) {
    if (alphabet_size_ > 36) throw ConstructionError("product alphabet exceeds 36 symbols");
    const auto& ga = a_->declared_gap();
    const auto& gb = b_->declared_gap();
    // The pointwise max is a gap bound for specification; transitivity of the
    // factors does not give a common gap, so no bound is declared then.
    if (ga && gb && ga->mode == GapMode::Specification && gb->mode == GapMode::Specification) {
        auto fa = *ga, fb = *gb;
        gap_ = GapBound{GapMode::Specification, [fa, fb](std::int64_t n) { return std::max(fa(n), fb(n)); },
                        "max(" + fa.description + ", " + fb.description + ")"};
    }
}

void ProductShift::project(SymbolView w, std::vector<Symbol>& first, std::vector<Symbol>& second) const {
    const int nb = b_->alphabet_size();
    first.resize(w.size());
    second.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        first[i] = static_cast<Symbol>(w[i] / nb);
        second[i] = static_cast<Symbol>(w[i] % nb);
    }
}

bool ProductShift::admissible(SymbolView w) const {
    std::vector<Symbol> x, y;
    project(w, x, y);
    return a_->admissible(x) && b_->admissible(y);
}

bool ProductShift::admissible_extension(SymbolView w) const {
    std::vector<Symbol> x, y;
    project(w, x, y);
    return a_->admissible_extension(x) && b_->admissible_extension(y);
}

// ---------------------------------------------------------------------------

Verdict word_admissible(const Subshift& spec, SymbolView w) {
    check_symbols(w, spec.alphabet_size());
    return spec.admissible(w) ? Verdict::Admissible : Verdict::Forbidden;
}

std::uint64_t for_each_word(const Subshift& spec, std::size_t n, std::uint64_t budget,
                            const std::function<void(SymbolView)>& visit) {
    if (budget == 0) throw InputError("enumeration budget must be positive");
    std::vector<Symbol> buf(n);
    std::uint64_t nodes = 1;
    if (n == 0) {
        visit(SymbolView{});
        return nodes;
    }
    const auto a = static_cast<Symbol>(spec.alphabet_size());
    // next[d]: next symbol to try at depth d.
    std::vector<int> next(n, 0);
    std::size_t depth = 0;
    for (;;) {
        if (next[depth] >= a) {
            if (depth == 0) break;
            --depth;
            continue;
        }
        buf[depth] = static_cast<Symbol>(next[depth]++);
        if (++nodes > budget) throw BudgetExhausted(nodes - 1, budget);
        if (!spec.admissible_extension(SymbolView(buf).first(depth + 1))) continue;
        if (depth + 1 == n) {
            visit(SymbolView(buf));
        } else {
            ++depth;
            next[depth] = 0;
        }
    }
    return nodes;
}

WordList enumerate_language(const Subshift& spec, std::size_t n, std::uint64_t budget) {
    WordList out(n);
    for_each_word(spec, n, budget, [&](SymbolView w) { out.push_back(w); });
    return out;
}

std::uint64_t count_language(const Subshift& spec, std::size_t n, std::uint64_t budget) {
    std::uint64_t count = 0;
    for_each_word(spec, n, budget, [&](SymbolView) { ++count; });
    return count;
}

SubshiftPtr make_full_shift(int alphabet_size) { return std::make_shared<FullShift>(alphabet_size); }

SubshiftPtr make_sft(int alphabet_size, std::vector<Word> forbidden) {
    return std::make_shared<SftShift>(alphabet_size, std::move(forbidden));
}

SubshiftPtr make_golden_mean() { return make_sft(2, {Word{1, 1}}); }

std::shared_ptr<const BoundedDensityShift> make_bounded_density(int k, const Sequence& h_seq, std::int64_t n_max) {
    if (k < 1 || k > 35) throw ConstructionError("bounded density: k must be in 1..35");
    if (n_max < 1) throw ConstructionError("bounded density: n_max must be positive");
    BoundedDensityParams p;
    p.k = k;
    p.n_max = n_max;
    p.h_description = h_seq.description();
    p.h.assign(static_cast<std::size_t>(n_max) + 1, 0);
    for (std::int64_t n = 1; n <= n_max; ++n) {
        p.h[static_cast<std::size_t>(n)] = h_seq.at_int(n);
        if (p.h[static_cast<std::size_t>(n)] < 0)
            throw ConstructionError(fmt::format("bounded density: h({}) is negative", n));
    }
    const auto& h = p.h;
    for (std::int64_t n = 2; n <= n_max; ++n)
        if (h[static_cast<std::size_t>(n)] < h[static_cast<std::size_t>(n - 1)])
            throw ConstructionError(fmt::format("bounded density: h not increasing at n={} (h({})={} > h({})={})", n,
                                                n - 1, h[static_cast<std::size_t>(n - 1)], n,
                                                h[static_cast<std::size_t>(n)]));
    for (std::int64_t m = 1; 2 * m <= n_max; ++m) {
        const std::int64_t hm = h[static_cast<std::size_t>(m)];
        for (std::int64_t n = m; m + n <= n_max; ++n)
            if (h[static_cast<std::size_t>(m + n)] > hm + h[static_cast<std::size_t>(n)])
                throw ConstructionError(fmt::format("bounded density: subadditivity violated at (m,n)=({},{})", m, n));
    }
    // alpha = min h(n)/n, kept exact.
    Rational a{h[1], 1};
    for (std::int64_t n = 2; n <= n_max; ++n)
        if (static_cast<__int128>(h[static_cast<std::size_t>(n)]) * a.den < static_cast<__int128>(a.num) * n)
            a = Rational{h[static_cast<std::size_t>(n)], n};
    if (a.num == 0) throw ConstructionError("bounded density: gradient estimate is zero (h(n) = 0 for some n)");
    auto g = std::gcd(a.num, a.den);
    p.alpha = Rational{a.num / g, a.den / g};
    p.e_num.assign(static_cast<std::size_t>(n_max) + 1, 0);
    p.e_env.assign(static_cast<std::size_t>(n_max) + 1, 0);
    for (std::int64_t n = 1; n <= n_max; ++n) {
        auto idx = static_cast<std::size_t>(n);
        p.e_num[idx] = h[idx] * p.alpha.den - n * p.alpha.num;
        p.e_env[idx] = std::max(p.e_env[idx - 1], p.e_num[idx]);
        if (n >= 2 && p.e_num[idx] < p.e_num[idx - 1]) p.e_increasing = false;
    }
    return std::make_shared<BoundedDensityShift>(std::move(p));
}

SturmianFactorSet make_sturmian_factors(std::int64_t p, std::int64_t q, int k_max) {
    if (!(0 < p && p < q)) throw ConstructionError("Sturmian slope must satisfy 0 < p < q");
    if (std::gcd(p, q) != 1) throw ConstructionError("Sturmian slope p/q must be in lowest terms");
    if (k_max < 1 || 2 * static_cast<std::int64_t>(k_max) > q)
        throw ConstructionError(fmt::format("Sturmian horizon k_max={} must satisfy 1 <= k_max <= q/2 (q={})", k_max, q));
    if (k_max + 1 > 62) throw ConstructionError("Sturmian horizon too large");
    std::vector<Symbol> period(static_cast<std::size_t>(q));
    for (std::int64_t i = 0; i < q; ++i)
        period[static_cast<std::size_t>(i)] = static_cast<Symbol>((i + 1) * p / q - i * p / q);
    // Lengths up to k_max + 1 so the extension property of the top layer is checkable.
    std::vector<std::vector<Word>> factors(static_cast<std::size_t>(k_max) + 2);
    factors[0].push_back(Word{});
    for (int k = 1; k <= k_max + 1; ++k) {
        std::set<Word> seen;
        std::vector<Symbol> buf(static_cast<std::size_t>(k));
        for (std::int64_t s = 0; s < q; ++s) {
            for (int i = 0; i < k; ++i) buf[static_cast<std::size_t>(i)] = period[static_cast<std::size_t>((s + i) % q)];
            seen.insert(Word(buf));
        }
        if (static_cast<int>(seen.size()) != k + 1)
            throw ConstructionError(fmt::format(
                "Sturmian factor count at length {} is {}, expected {} (horizon too close to q={})", k, seen.size(),
                k + 1, q));
        factors[static_cast<std::size_t>(k)].assign(seen.begin(), seen.end());
    }
    return SturmianFactorSet(p, q, k_max, std::move(factors));
}

std::shared_ptr<const SparseSturmianShift> make_sparse_sturmian(SturmianFactorSet fs, std::vector<std::int64_t> n_seq) {
    if (n_seq.empty()) throw ConstructionError("sparse Sturmian: n_seq must be nonempty");
    if (n_seq[0] < 2) throw ConstructionError("sparse Sturmian: n_1 must be at least 2");
    if (static_cast<int>(n_seq.size()) > fs.k_max())
        throw ConstructionError(fmt::format("sparse Sturmian: {} levels exceed the factor horizon k_max={}",
                                            n_seq.size(), fs.k_max()));
    for (std::size_t i = 1; i < n_seq.size(); ++i) {
        const auto k = static_cast<std::int64_t>(i + 1);
        if (n_seq[i] <= n_seq[i - 1])
            throw ConstructionError("sparse Sturmian: n_seq must be strictly increasing");
        if (n_seq[i] < 2 * n_seq[i - 1] + 2 * k)
            throw ConstructionError(fmt::format("sparse Sturmian: growth condition violated at k={}: n_k={} < 2*{}+{}",
                                                k, n_seq[i], n_seq[i - 1], 2 * k));
    }
    return std::make_shared<SparseSturmianShift>(std::move(fs), std::move(n_seq));
}

SubshiftPtr product_subshift(SubshiftPtr a, SubshiftPtr b) {
    if (!a || !b) throw InputError("product of null subshifts");
    return std::make_shared<ProductShift>(std::move(a), std::move(b));
}

} // namespace symdyn
