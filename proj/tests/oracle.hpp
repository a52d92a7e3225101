#pragma once
// Independent reference implementations used as test oracles. Deliberately
// naive: direct from definitions, no shared code with the library beyond Word.

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "symdyn/word.hpp"

namespace oracle {

using symdyn::Symbol;
using symdyn::Word;

inline std::vector<Word> all_words(int alphabet, std::size_t n) {
    std::vector<Word> out;
    std::vector<Symbol> w(n, 0);
    for (;;) {
        out.emplace_back(w);
        std::size_t i = n;
        while (i > 0 && w[i - 1] == alphabet - 1) w[--i] = 0;
        if (i == 0) break;
        ++w[i - 1];
    }
    return out;
}

inline bool contains_factor(const std::vector<Symbol>& w, const std::vector<Symbol>& f) {
    if (f.size() > w.size()) return false;
    for (std::size_t s = 0; s + f.size() <= w.size(); ++s) {
        bool eq = true;
        for (std::size_t i = 0; i < f.size(); ++i) eq = eq && w[s + i] == f[i];
        if (eq) return true;
    }
    return false;
}

inline bool locally_ok(const std::vector<Symbol>& w, const std::vector<Word>& forbidden) {
    for (const auto& f : forbidden)
        if (contains_factor(w, f.symbols())) return false;
    return true;
}

// w is in the SFT language iff it sits inside a locally admissible word with
// `pad` free symbols on each side; pad >= number of memory blocks suffices.
inline bool sft_member(const Word& w, int alphabet, const std::vector<Word>& forbidden, std::size_t pad) {
    if (!locally_ok(w.symbols(), forbidden)) return false;
    std::function<bool(std::vector<Symbol>&, std::size_t)> right = [&](std::vector<Symbol>& cur, std::size_t left) {
        if (left == 0) return true;
        for (int a = 0; a < alphabet; ++a) {
            cur.push_back(static_cast<Symbol>(a));
            bool ok = locally_ok(cur, forbidden) && right(cur, left - 1);
            cur.pop_back();
            if (ok) return true;
        }
        return false;
    };
    std::function<bool(std::vector<Symbol>&, std::size_t)> left_then_right = [&](std::vector<Symbol>& cur,
                                                                                 std::size_t left) {
        if (left == 0) return right(cur, pad);
        for (int a = 0; a < alphabet; ++a) {
            cur.insert(cur.begin(), static_cast<Symbol>(a));
            bool ok = locally_ok(cur, forbidden) && left_then_right(cur, left - 1);
            cur.erase(cur.begin());
            if (ok) return true;
        }
        return false;
    };
    auto cur = w.symbols();
    return left_then_right(cur, pad);
}

inline bool bounded_density_member(const Word& w, const std::function<std::int64_t(std::int64_t)>& h) {
    for (std::size_t s = 0; s < w.size(); ++s) {
        std::int64_t sum = 0;
        for (std::size_t e = s; e < w.size(); ++e) {
            sum += w[e];
            if (sum > h(static_cast<std::int64_t>(e - s + 1))) return false;
        }
    }
    return true;
}

// Factors of length k of the mechanical word of slope p/q, via floating-free
// rotation coding: symbol i is 1 iff (i*p mod q) >= q - p.
inline std::set<Word> mechanical_factors(std::int64_t p, std::int64_t q, std::size_t k) {
    std::set<Word> out;
    for (std::int64_t s = 0; s < q; ++s) {
        Word w;
        for (std::size_t i = 0; i < k; ++i) {
            std::int64_t pos = (s + static_cast<std::int64_t>(i)) % q;
            w.push_back(((pos * p) % q) >= q - p ? 1 : 0);
        }
        out.insert(w);
    }
    return out;
}

inline bool sparse_sturmian_member(const Word& w, std::int64_t p, std::int64_t q, const std::vector<std::int64_t>& n_seq) {
    for (std::size_t j = 1; j <= n_seq.size(); ++j) {
        auto len = static_cast<std::size_t>(n_seq[j - 1]) + 2 * j;
        if (len > w.size()) continue;
        auto fs = mechanical_factors(p, q, j);
        for (std::size_t s = 0; s + len <= w.size(); ++s) {
            bool found = false;
            for (std::size_t i = s; i + j <= s + len && !found; ++i) found = fs.count(w.sub(i, j)) > 0;
            if (!found) return false;
        }
    }
    return true;
}

} // namespace oracle

namespace oracle {

// Level potential evaluated on a finite array standing for a point: the run at
// `i` stops at the array ends, i.e. the point differs just beyond them.
inline double run_level_value(const std::vector<Symbol>& x, std::size_t i, const std::function<double(std::int64_t)>& level) {
    std::int64_t k = 0;
    while (true) {
        std::int64_t nk = k + 1;
        if (static_cast<std::int64_t>(i) - nk < 0 || i + static_cast<std::size_t>(nk) >= x.size()) break;
        if (x[i - static_cast<std::size_t>(nk)] != x[i] || x[i + static_cast<std::size_t>(nk)] != x[i]) break;
        k = nk;
    }
    return level(k);
}

// Random two-sided extension of w by `pad` symbols per side, each step kept
// admissible for `ok`. Returns false if it got stuck.
template <class Rng>
bool random_extension(const Word& w, int alphabet, std::size_t pad, const std::function<bool(const std::vector<Symbol>&)>& ok,
                      Rng& rng, std::vector<Symbol>& out) {
    out = w.symbols();
    for (std::size_t step = 0; step < 2 * pad; ++step) {
        bool right = step % 2 == 0;
        std::vector<int> order(static_cast<std::size_t>(alphabet));
        for (int a = 0; a < alphabet; ++a) order[static_cast<std::size_t>(a)] = a;
        std::shuffle(order.begin(), order.end(), rng);
        bool placed = false;
        for (int a : order) {
            auto cand = out;
            if (right) cand.push_back(static_cast<Symbol>(a));
            else cand.insert(cand.begin(), static_cast<Symbol>(a));
            if (ok(cand)) {
                out = std::move(cand);
                placed = true;
                break;
            }
        }
        if (!placed) return false;
    }
    return true;
}

} // namespace oracle

namespace oracle {

inline double table_value(const std::vector<Symbol>& x, std::size_t i, int radius, const std::map<Word, double>& table,
                          double default_value) {
    Word block;
    for (std::size_t j = i - static_cast<std::size_t>(radius); j <= i + static_cast<std::size_t>(radius); ++j) block.push_back(x[j]);
    auto it = table.find(block);
    return it == table.end() ? default_value : it->second;
}

inline double log_sum_exp(const std::vector<double>& v) {
    long double m = -INFINITY;
    for (double x : v) m = std::max<long double>(m, x);
    long double s = 0;
    for (double x : v) s += std::exp(static_cast<long double>(x) - m);
    return static_cast<double>(m + std::log(s));
}

struct ZSample {
    double ln_min = 0;  // ln sum_w exp(min sampled S_n)
    double ln_max = 0;  // ln sum_w exp(max sampled S_n)
    std::size_t count = 0;
};

// Brute force: every |A|^n word filtered by `member`, each extended `samples`
// times by `pad` symbols per side, S_n summed from `phi` on the extension.
template <class Rng>
ZSample brute_partition(int alphabet, std::size_t n, const std::function<bool(const Word&)>& member,
                        const std::function<bool(const std::vector<Symbol>&)>& extend_ok,
                        const std::function<double(const std::vector<Symbol>&, std::size_t)>& phi, std::size_t pad,
                        int samples, Rng& rng) {
    std::vector<double> mins, maxs;
    for (const auto& w : all_words(alphabet, n)) {
        if (!member(w)) continue;
        double lo = INFINITY, hi = -INFINITY;
        for (int t = 0; t < samples; ++t) {
            std::vector<Symbol> x;
            if (!random_extension(w, alphabet, pad, extend_ok, rng, x)) continue;
            double s = 0;
            for (std::size_t i = 0; i < n; ++i) s += phi(x, pad + i);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        mins.push_back(lo);
        maxs.push_back(hi);
    }
    return {log_sum_exp(mins), log_sum_exp(maxs), mins.size()};
}

} // namespace oracle
