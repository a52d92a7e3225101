#include "symdyn/speccheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "symdyn/error.hpp"

namespace symdyn {

using nlohmann::ordered_json;

std::string to_string(GlueStrategy s) {
    switch (s) {
    case GlueStrategy::Exhaustive: return "exhaustive";
    case GlueStrategy::ZeroGlue: return "zero_glue";
    case GlueStrategy::FactorGlue: return "factor_glue";
    }
    return "?";
}

GlueStrategy parse_glue_strategy(const std::string& s) {
    if (s == "exhaustive") return GlueStrategy::Exhaustive;
    if (s == "zero_glue") return GlueStrategy::ZeroGlue;
    if (s == "factor_glue") return GlueStrategy::FactorGlue;
    throw InputError("unknown glue strategy '" + s + "' (exhaustive | zero_glue | factor_glue)");
}

std::string to_string(Theorem t) {
    switch (t) {
    case Theorem::Thm4_2: return "Thm4_2";
    case Theorem::Cor4_3: return "Cor4_3";
    case Theorem::Thm4_4: return "Thm4_4";
    case Theorem::Thm4_6: return "Thm4_6";
    case Theorem::Thm5_2: return "Thm5_2";
    case Theorem::Thm5_6: return "Thm5_6";
    }
    return "?";
}

Theorem parse_theorem(const std::string& tag) {
    for (Theorem t : {Theorem::Thm4_2, Theorem::Cor4_3, Theorem::Thm4_4, Theorem::Thm4_6, Theorem::Thm5_2, Theorem::Thm5_6})
        if (to_string(t) == tag) return t;
    throw InputError("unknown theorem tag '" + tag + "' (Thm4_2 | Cor4_3 | Thm4_4 | Thm4_6 | Thm5_2 | Thm5_6)");
}

std::string to_string(BoundVerdict v) {
    switch (v) {
    case BoundVerdict::Pass: return "Pass";
    case BoundVerdict::Fail: return "Fail";
    case BoundVerdict::PreconditionFail: return "PreconditionFail";
    }
    return "?";
}

double BoundReport::min_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& x : margins) m = std::fmin(m, x.value);
    return m;
}

namespace {

void charge(std::uint64_t& nodes, std::uint64_t budget, std::uint64_t k = 1) {
    nodes += k;
    if (nodes > budget) throw BudgetExhausted(nodes - k, budget);
}

bool glue_dfs(const Subshift& spec, std::vector<Symbol>& buf, std::size_t v_len, std::size_t m, SymbolView w,
              std::uint64_t& nodes, std::uint64_t budget) {
    if (buf.size() == v_len + m) {
        charge(nodes, budget);
        const std::size_t base = buf.size();
        buf.insert(buf.end(), w.begin(), w.end());
        bool ok = spec.admissible(buf);
        buf.resize(base);
        return ok;
    }
    for (int a = 0; a < spec.alphabet_size(); ++a) {
        charge(nodes, budget);
        buf.push_back(static_cast<Symbol>(a));
        if (spec.admissible_extension(buf) && glue_dfs(spec, buf, v_len, m, w, nodes, budget)) return true;
        buf.pop_back();
    }
    return false;
}

bool check_glued(const Subshift& spec, SymbolView v, SymbolView u, SymbolView w, std::vector<Symbol>& buf) {
    buf.assign(v.begin(), v.end());
    buf.insert(buf.end(), u.begin(), u.end());
    buf.insert(buf.end(), w.begin(), w.end());
    return spec.admissible(buf);
}

// Pair indices to examine, in lexicographic order.
std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_pairs(const WordList& lang, const GapSearchOptions& opt,
                                                                  bool& sampled) {
    const std::uint64_t N = lang.size();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    sampled = N * N > opt.pair_cutoff;
    if (!sampled) return out;
    // Extremes: first, last and up to 8 maximal-density words.
    std::vector<std::uint32_t> extremes{0, static_cast<std::uint32_t>(N - 1)};
    std::uint64_t best = 0;
    std::vector<std::uint32_t> dense;
    for (std::uint64_t i = 0; i < N; ++i) {
        std::uint64_t s = 0;
        for (Symbol x : lang[i]) s += x;
        if (s > best) {
            best = s;
            dense.clear();
        }
        if (s == best && dense.size() < 8) dense.push_back(static_cast<std::uint32_t>(i));
    }
    extremes.insert(extremes.end(), dense.begin(), dense.end());
    for (auto e : extremes)
        for (std::uint64_t j = 0; j < N; ++j) {
            out.emplace_back(e, static_cast<std::uint32_t>(j));
            out.emplace_back(static_cast<std::uint32_t>(j), e);
        }
    std::mt19937_64 rng(opt.seed);
    for (std::uint64_t t = 0; t < opt.sample_size; ++t) {
        auto a = static_cast<std::uint32_t>(rng() % N);
        auto b = static_cast<std::uint32_t>(rng() % N);
        out.emplace_back(a, b);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Calls visit(i, j) over all pairs or the sample; stops when visit returns false.
template <class Visit>
void for_each_pair(const WordList& lang, const GapSearchOptions& opt, std::uint64_t& checked, bool& sampled, Visit visit) {
    auto sample = sample_pairs(lang, opt, sampled);
    if (sampled) {
        for (auto [i, j] : sample) {
            ++checked;
            if (!visit(i, j)) return;
        }
        return;
    }
    for (std::size_t i = 0; i < lang.size(); ++i)
        for (std::size_t j = 0; j < lang.size(); ++j) {
            ++checked;
            if (!visit(i, j)) return;
        }
}

ordered_json word_json(SymbolView w) { return to_string(w); }

} // namespace

std::optional<Word> find_glue(const Subshift& spec, SymbolView v, SymbolView w, std::int64_t m, GlueStrategy strategy,
                              const SturmianFactorSet* factors, std::uint64_t& nodes, std::uint64_t budget) {
    if (m < 0) return std::nullopt;
    const auto mm = static_cast<std::size_t>(m);
    std::vector<Symbol> buf;
    switch (strategy) {
    case GlueStrategy::ZeroGlue: {
        charge(nodes, budget);
        Word u = repeat(0, mm);
        if (check_glued(spec, v, u, w, buf)) return u;
        return std::nullopt;
    }
    case GlueStrategy::FactorGlue: {
        if (!factors) throw InputError("factor_glue needs a Sturmian factor set");
        if (spec.alphabet_size() != 2) throw InputError("factor_glue needs a binary alphabet");
        for (std::size_t a = 0; a <= mm; ++a) {
            const std::size_t b = mm - a;
            if (static_cast<int>(a) > factors->stored_length() || static_cast<int>(b) > factors->stored_length()) continue;
            for (const auto& s : factors->factors(static_cast<int>(a)))
                for (const auto& t : factors->factors(static_cast<int>(b))) {
                    charge(nodes, budget);
                    Word u = concat({s, t});
                    if (check_glued(spec, v, u, w, buf)) return u;
                }
        }
        return std::nullopt;
    }
    case GlueStrategy::Exhaustive: {
        buf.assign(v.begin(), v.end());
        if (glue_dfs(spec, buf, v.size(), mm, w, nodes, budget))
            return Word(SymbolView(buf).subspan(v.size(), mm));
        return std::nullopt;
    }
    }
    return std::nullopt;
}

GapRow min_gap_profile(const Subshift& spec, std::int64_t n, GapMode mode, std::int64_t m_max, GlueStrategy strategy,
                       const GapSearchOptions& opt) {
    if (n < 1) throw InputError("gap profile needs n >= 1");
    if (m_max < 0) throw InputError("gap profile needs m_max >= 0");
    GapRow row;
    row.n = n;
    row.mode = mode;
    row.m_max = m_max;
    row.f_declared = opt.f_declared;
    const auto lang = enumerate_language(spec, static_cast<std::size_t>(n), opt.budget);
    row.pairs_total = static_cast<std::uint64_t>(lang.size()) * lang.size();
    std::uint64_t& nodes = row.nodes;
    std::int64_t worst = -1;
    bool stuck = false;

    auto glue = [&](SymbolView v, SymbolView w, std::int64_t m) {
        return find_glue(spec, v, w, m, strategy, opt.factors, nodes, opt.budget);
    };

    for_each_pair(lang, opt, row.pairs_checked, row.sampled, [&](std::size_t i, std::size_t j) {
        const SymbolView v = lang[i], w = lang[j];
        std::int64_t need = -1;
        std::optional<Word> u_need;
        if (mode == GapMode::Transitivity) {
            for (std::int64_t m = 0; m <= m_max && need < 0; ++m)
                if (auto u = glue(v, w, m)) {
                    need = m;
                    u_need = std::move(u);
                }
            if (need < 0) {
                stuck = true;
                row.witness_v = Word(v);
                row.witness_u = Word{};
                row.witness_w = Word(w);
                if (opt.f_declared && m_max >= *opt.f_declared && !row.counterexample)
                    row.counterexample = GapCounterexample{Word(v), Word(w), *opt.f_declared};
                return false;
            }
            if (opt.f_declared && need > *opt.f_declared && !row.counterexample)
                row.counterexample = GapCounterexample{Word(v), Word(w), *opt.f_declared};
        } else {
            std::int64_t m = m_max;
            std::optional<Word> u_at;
            for (; m >= 0; --m) {
                auto u = glue(v, w, m);
                if (!u) break;
                u_at = std::move(u);
            }
            if (m == m_max) {
                stuck = true;
                row.witness_v = Word(v);
                row.witness_u = Word{};
                row.witness_w = Word(w);
                if (opt.f_declared && m_max >= *opt.f_declared && !row.counterexample)
                    row.counterexample = GapCounterexample{Word(v), Word(w), m_max};
                return false;
            }
            need = m + 1;
            u_need = std::move(u_at);
            if (opt.f_declared && need > *opt.f_declared && !row.counterexample) {
                // smallest failing gap at or above the declaration
                std::int64_t bad = std::max<std::int64_t>(*opt.f_declared, 0);
                while (bad < need - 1 && glue(v, w, bad)) ++bad;
                row.counterexample = GapCounterexample{Word(v), Word(w), bad};
            }
        }
        if (need > worst) {
            worst = need;
            row.witness_v = Word(v);
            row.witness_u = *u_need;
            row.witness_w = Word(w);
        }
        return true;
    });
    if (!stuck) row.f_empirical = std::max<std::int64_t>(worst, 0);
    return row;
}

// ---------------------------------------------------------------------------

namespace {

void finalize(BoundReport& rep) {
    if (rep.verdict == BoundVerdict::PreconditionFail) return;
    rep.verdict = BoundVerdict::Pass;
    for (const auto& m : rep.margins)
        if (!(m.value >= -rep.tolerance)) rep.verdict = BoundVerdict::Fail;
}

ordered_json growth_json(const GrowthReport& g) {
    ordered_json r = ordered_json::array();
    for (const auto& [n, v] : g.ratio) r.push_back({n, v});
    return {{"class", g.label()}, {"slope", g.slope}, {"g_over_ln_n", r}};
}

} // namespace

BoundReport verify_bdspec(const BoundedDensityShift& bd, std::int64_t n_lo, std::int64_t n_hi, const BdSpecOptions& opt) {
    if (n_lo < 1 || n_hi < n_lo) throw InputError("verify Thm5_2: bad n range");
    const auto& p = bd.params();
    const GapBound f = opt.declared ? *opt.declared : *bd.declared_gap();
    BoundReport rep;
    rep.tag = Theorem::Thm5_2;
    rep.tolerance = 0;
    std::uint64_t nodes = 0;
    std::mt19937_64 rng(opt.search.seed);
    ordered_json coverage = ordered_json::array();
    std::vector<Symbol> buf;
    for (std::int64_t n = n_lo; n <= n_hi; ++n) {
        const std::int64_t fn = f(n);
        if (fn < 0) throw InputError(fmt::format("declared gap f({}) is negative", n));
        const std::int64_t top = fn + opt.slack;
        if (2 * n + top > p.n_max)
            throw InputError(fmt::format("h is stored to {}, verification at n={} needs {}", p.n_max, n, 2 * n + top));
        const auto lang = enumerate_language(bd, static_cast<std::size_t>(n), opt.search.budget);
        std::int64_t needed = 0;
        std::uint64_t checked = 0;
        bool sampled = false;
        for_each_pair(lang, opt.search, checked, sampled, [&](std::size_t i, std::size_t j) {
            const SymbolView v = lang[i], w = lang[j];
            std::int64_t m = top;
            for (; m >= 0; --m) {
                charge(nodes, opt.search.budget);
                if (!check_glued(bd, v, repeat(0, static_cast<std::size_t>(m)), w, buf)) break;
            }
            const std::int64_t m0 = m + 1;  // top + 1 when even the widest gap fails
            if (m0 > fn && !rep.witnesses.contains("counterexample")) {
                std::int64_t bad = fn;
                while (bad < m0 - 1 && check_glued(bd, v, repeat(0, static_cast<std::size_t>(bad)), w, buf)) ++bad;
                rep.witnesses["counterexample"] = {{"n", n}, {"v", word_json(v)}, {"w", word_json(w)}, {"m", bad}};
            }
            needed = std::max(needed, m0);
            return true;
        });
        rep.margins.push_back({n, static_cast<double>(fn - needed), 0});
        coverage.push_back({{"n", n}, {"pairs_total", static_cast<std::uint64_t>(lang.size()) * lang.size()},
                            {"pairs_checked", checked}, {"sampled", sampled}, {"f", fn}, {"f_needed", needed}});

        // three segments with gaps in [f, f + slack]
        const std::uint64_t N = lang.size();
        for (int t = 0; t < opt.triples_per_n; ++t) {
            auto a = rng() % N, b = rng() % N, c = rng() % N;
            auto m1 = fn + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(opt.slack + 1));
            auto m2 = fn + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(opt.slack + 1));
            Word x = concat({lang[a], repeat(0, static_cast<std::size_t>(m1)), lang[b], repeat(0, static_cast<std::size_t>(m2)), lang[c]});
            charge(nodes, opt.search.budget);
            if (static_cast<std::int64_t>(x.size()) <= p.n_max && !bd.admissible(x) && !rep.witnesses.contains("triple")) {
                rep.witnesses["triple"] = {{"n", n}, {"words", {word_json(lang[a]), word_json(lang[b]), word_json(lang[c])}},
                                           {"gaps", {m1, m2}}};
                rep.margins.push_back({n, -1.0, 0});
            }
        }
    }
    finalize(rep);
    rep.extras["alpha"] = fmt::format("{}/{}", p.alpha.num, p.alpha.den);
    rep.extras["alpha_value"] = p.alpha.value();
    rep.extras["e_increasing"] = p.e_increasing;
    rep.extras["gap_bound"] = f.description;
    rep.extras["slack"] = opt.slack;
    rep.extras["coverage"] = coverage;
    if (p.n_max >= 32) {
        std::vector<double> env(static_cast<std::size_t>(p.n_max / 2) + 1, 0.0);
        for (std::int64_t n = 1; n <= p.n_max / 2; ++n)
            env[static_cast<std::size_t>(n)] = std::fmax(env[static_cast<std::size_t>(n - 1)], static_cast<double>(p.doubling_defect(n)));
        rep.extras["doubling_defect_growth"] = growth_json(growth_class(env, p.n_max / 2));
    }
    if (rep.verdict == BoundVerdict::Fail) rep.message = "declared gap bound fails for some pair";
    return rep;
}

BoundReport verify_transex_gap(const SparseSturmianShift& spec, std::int64_t n_lo, std::int64_t n_hi,
                               GlueStrategy strategy, const GapSearchOptions& options) {
    if (n_lo < 1 || n_hi < n_lo) throw InputError("verify Thm5_6: bad n range");
    if (!spec.level_for(n_hi)) throw InputError(fmt::format("n={} exceeds the last n_k={}", n_hi, spec.n_seq().back()));
    BoundReport rep;
    rep.tag = Theorem::Thm5_6;
    rep.tolerance = 0;
    ordered_json rows = ordered_json::array();
    GapSearchOptions opt = options;
    if (!opt.factors) opt.factors = &spec.factor_set();
    for (std::int64_t n = n_lo; n <= n_hi; ++n) {
        auto k = spec.level_for(n);
        if (!k) throw InputError(fmt::format("n={} exceeds the last n_k={}", n, spec.n_seq().back()));
        const std::int64_t f = 2 * *k;
        opt.f_declared = f;
        auto row = min_gap_profile(spec, n, GapMode::Transitivity, f, strategy, opt);
        ordered_json r = {{"n", n}, {"k", *k}, {"f", f}, {"pairs_total", row.pairs_total},
                          {"pairs_checked", row.pairs_checked}, {"sampled", row.sampled}};
        if (row.exhausted()) {
            rep.margins.push_back({n, -1.0, 0});
            r["f_empirical"] = nullptr;
            r["status"] = "horizon_exhausted";
            if (!rep.witnesses.contains("counterexample"))
                rep.witnesses["counterexample"] = {{"n", n}, {"v", to_string(row.witness_v)}, {"w", to_string(row.witness_w)},
                                                   {"m_max", f}};
        } else {
            rep.margins.push_back({n, static_cast<double>(f - *row.f_empirical), 0});
            r["f_empirical"] = *row.f_empirical;
            r["witness"] = {to_string(row.witness_v), to_string(row.witness_u), to_string(row.witness_w)};
        }
        rows.push_back(r);
    }
    finalize(rep);
    rep.extras["rows"] = rows;
    rep.extras["strategy"] = to_string(strategy);
    rep.extras["upper_bound_only"] = true;
    if (rep.verdict == BoundVerdict::Fail) rep.message = "some pair has no glue of length <= 2k";
    return rep;
}

BoundReport verify_partition_bound_spec(const PartitionTable& table, double P, const GapBound& f,
                                        const std::vector<double>& g, double inf_phi, std::int64_t n_lo,
                                        std::int64_t n_hi) {
    if (n_lo < 1 || n_hi > table.n_max() || n_hi < n_lo) throw InputError("verify Thm4_2: n range outside the table");
    if (static_cast<std::int64_t>(g.size()) <= n_hi) throw InputError("verify Thm4_2: g does not cover the range");
    BoundReport rep;
    rep.tag = Theorem::Thm4_2;
    for (std::int64_t n = n_lo; n <= n_hi; ++n) {
        const auto fn = static_cast<double>(f(n));
        const double margin = (static_cast<double>(n) + fn) * P - fn * inf_phi + g[static_cast<std::size_t>(n)] - table.at(n).lnZ_hi;
        rep.margins.push_back({n, margin, 0});
    }
    finalize(rep);
    rep.extras["P"] = P;
    rep.extras["inf_phi"] = inf_phi;
    rep.extras["gap_bound"] = f.description;
    if (table.upper_bound_only) rep.extras["upper_bound_only"] = true;
    return rep;
}

BoundReport verify_partition_bound_trans(const PartitionTable& table, double P, double C, std::int64_t M,
                                         const GapBound& f, const std::vector<double>& g, double inf_phi,
                                         std::int64_t n_hi) {
    if (M < 3) throw InputError("verify Thm4_4: onset M must be >= 3");
    if (!(C > 0)) throw InputError("verify Thm4_4: C must be positive");
    if (n_hi > table.n_max() || n_hi < M) throw InputError("verify Thm4_4: n range outside the table");
    if (static_cast<std::int64_t>(g.size()) <= n_hi) throw InputError("verify Thm4_4: g does not cover the range");
    BoundReport rep;
    rep.tag = Theorem::Thm4_4;
    for (std::int64_t n = M; n <= n_hi; ++n) {
        const double lhs = static_cast<double>(f(n)) + g[static_cast<std::size_t>(n)];
        const double cap = std::fmin(C * std::log(static_cast<double>(n)), static_cast<double>(n));
        if (lhs > cap) {
            rep.verdict = BoundVerdict::PreconditionFail;
            rep.witnesses["precondition"] = {{"n", n}, {"f_plus_g", lhs}, {"cap", cap}};
            rep.message = fmt::format("f(n) + g(n) = {} exceeds min(C ln n, n) = {:.6g} at n={}", lhs, cap, n);
            rep.extras["C"] = C;
            rep.extras["M"] = M;
            return rep;
        }
    }
    const double E = P + 2 + std::fabs(inf_phi - 1);
    const double lnD = C * E * std::log(9.0);
    double least_E = 0;
    for (std::int64_t n = M; n <= n_hi; ++n) {
        const double ln_n = std::log(static_cast<double>(n));
        const double lnZ = table.at(n).lnZ_hi;
        rep.margins.push_back({n, lnD + static_cast<double>(n) * P + C * E * ln_n - lnZ, 0});
        least_E = std::fmax(least_E, (lnZ - static_cast<double>(n) * P) / (C * std::log(9.0 * static_cast<double>(n))));
    }
    finalize(rep);
    rep.extras["P"] = P;
    rep.extras["C"] = C;
    rep.extras["M"] = M;
    rep.extras["E"] = E;
    rep.extras["ln_D"] = lnD;
    rep.extras["least_E"] = least_E;
    return rep;
}

BoundReport verify_speccor(const PartitionTable& table, double P, const AnchorSequence& anchors, double epsilon,
                           const GapBound& f, const std::vector<double>& g, double inf_phi) {
    if (epsilon < 0) throw InputError("verify Cor4_3: epsilon must be nonnegative");
    std::vector<Anchor> usable;
    for (const auto& a : anchors.anchors)
        if (a.n <= table.n_max()) usable.push_back(a);
    if (usable.empty()) throw InputError("verify Cor4_3: no anchors within the partition table horizon");
    BoundReport rep;
    rep.tag = Theorem::Cor4_3;
    std::vector<std::vector<Margin>> per(usable.size());
    std::vector<char> ok(usable.size(), 1);
    for (std::size_t k = 0; k < usable.size(); ++k) {
        const std::int64_t nk = usable[k].n;
        for (std::int64_t i = 1; i <= nk; ++i) {
            const double m = static_cast<double>(i) * P + epsilon * std::log(static_cast<double>(nk)) - table.at(i).lnZ_hi;
            per[k].push_back({i, m, nk});
            if (!(m >= -rep.tolerance)) ok[k] = 0;
        }
    }
    std::size_t onset = usable.size();
    while (onset > 0 && ok[onset - 1]) --onset;
    const bool found = onset < usable.size();
    ordered_json pre = ordered_json::array();
    for (std::size_t k = 0; k < usable.size(); ++k) {
        if (found && k < onset) {
            double mn = std::numeric_limits<double>::infinity();
            for (const auto& m : per[k]) mn = std::fmin(mn, m.value);
            pre.push_back({{"anchor", usable[k].n}, {"min_margin", mn}});
            continue;
        }
        rep.margins.insert(rep.margins.end(), per[k].begin(), per[k].end());
    }
    finalize(rep);
    // onset predicted by the corollary's proof
    ordered_json theory = nullptr;
    const double scale = epsilon / (P + std::fabs(inf_phi) + 1);
    for (std::size_t k = 0; k < usable.size(); ++k) {
        const auto nk = usable[k].n;
        if (static_cast<double>(f(nk)) + g.at(static_cast<std::size_t>(nk)) < scale * std::log(static_cast<double>(nk))) {
            theory = {{"index", k + 1}, {"anchor", nk}};
            break;
        }
    }
    rep.extras["epsilon"] = epsilon;
    rep.extras["P"] = P;
    rep.extras["anchors"] = ordered_json::array();
    for (const auto& a : usable) rep.extras["anchors"].push_back({{"epsilon", a.epsilon}, {"n", a.n}, {"score", a.score}});
    rep.extras["onset_index"] = found ? ordered_json(onset + 1) : ordered_json(nullptr);
    rep.extras["onset_anchor"] = found ? ordered_json(usable[onset].n) : ordered_json(nullptr);
    rep.extras["pre_onset"] = pre;
    rep.extras["proof_onset"] = theory;
    if (!found) rep.message = "the last anchor has a negative margin; no onset on this horizon";
    return rep;
}

BoundReport verify_measbd(const Subshift& spec, const Potential& pot, const MarkovMeasure& mm,
                          const TransferModel& model, SymbolView cylinder, std::int64_t n_lo, std::int64_t n_hi,
                          const std::vector<double>& g, double P, std::uint64_t budget) {
    if (n_lo < 1 || n_hi < n_lo) throw InputError("verify Thm4_6: bad n range");
    if (static_cast<std::int64_t>(g.size()) <= n_hi) throw InputError("verify Thm4_6: g does not cover the range");
    const double mu = cylinder_measure(mm, model, cylinder);
    if (!(mu > 0)) throw InputError("verify Thm4_6: cylinder has measure zero");
    BoundReport rep;
    rep.tag = Theorem::Thm4_6;
    ordered_json sides = ordered_json::array();
    for (std::int64_t n = n_lo; n <= n_hi; ++n) {
        std::vector<double> lo;
        const std::size_t overlap = std::min(cylinder.size(), static_cast<std::size_t>(n));
        for_each_word(spec, static_cast<std::size_t>(n), budget, [&](SymbolView w) {
            if (std::equal(cylinder.begin(), cylinder.begin() + static_cast<std::ptrdiff_t>(overlap), w.begin()))
                lo.push_back(pot.sum(w).lo);
        });
        const double lhs = LogSumExp::lower(lo);
        const double lnZ = partition_function(spec, pot, n, budget).lnZ_lo;
        const double rhs = static_cast<double>(n) * P / mu + ((mu - 1) / mu) * lnZ - g[static_cast<std::size_t>(n)] - std::log(2.0) / mu;
        rep.margins.push_back({n, lhs - rhs, 0});
        sides.push_back({{"n", n}, {"lhs", lhs}, {"rhs", rhs}, {"words", lo.size()}});
    }
    finalize(rep);
    rep.extras["cylinder"] = to_string(cylinder);
    rep.extras["mu"] = mu;
    rep.extras["P"] = P;
    rep.extras["separation_constant_M"] = 1;
    rep.extras["sides"] = sides;
    return rep;
}

} // namespace symdyn
