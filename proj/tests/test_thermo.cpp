#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "symdyn/error.hpp"
#include "symdyn/thermo.hpp"

using namespace symdyn;

namespace {

Word w(const char* s, int a = 2) { return parse_word(s, a); }
constexpr std::uint64_t kBudget = 100'000'000;
const double kGolden = (1 + std::sqrt(5.0)) / 2;

GapBound constant_gap(std::int64_t c) {
    return GapBound{GapMode::Specification, [c](std::int64_t) { return c; }, std::to_string(c)};
}

std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

} // namespace

TEST_CASE("partition function examples") {
    auto zero = make_zero_potential(2);
    auto row = partition_function(*make_full_shift(2), *zero, 10, kBudget);
    CHECK(row.count == 1024);
    CHECK(row.lnZ_lo <= 10 * std::log(2.0));
    CHECK(row.lnZ_hi >= 10 * std::log(2.0));
    CHECK(row.lnZ_hi - row.lnZ_lo < 1e-14);
    row = partition_function(*make_golden_mean(), *zero, 5, kBudget);
    CHECK(row.count == 13);
    CHECK(row.lnZ_lo == doctest::Approx(std::log(13.0)).epsilon(1e-15));
}

TEST_CASE("phi_h partition function encloses the brute-force value") {
    std::mt19937_64 rng(1);
    auto phi = make_phi_h(Sequence::formula("(k+1)^2"));
    auto row = partition_function(*make_full_shift(2), *phi, 3, kBudget);
    auto level = [](std::int64_t k) { return 1.0 / static_cast<double>((k + 1) * (k + 1)); };
    auto z = oracle::brute_partition(
        2, 3, [](const Word&) { return true; }, [](const std::vector<Symbol>&) { return true; },
        [&](const std::vector<Symbol>& x, std::size_t i) { return oracle::run_level_value(x, i, level); }, 10, 200, rng);
    CHECK(z.count == 8);
    CHECK(row.lnZ_lo <= z.ln_min);
    CHECK(z.ln_max <= row.lnZ_hi);
    CHECK(row.lnZ_hi - row.lnZ_lo < 1.0);
}

TEST_CASE("lnZ_hi is subadditive") {
    std::mt19937_64 rng(2);
    std::map<Word, double> vals;
    for (const auto& b : oracle::all_words(2, 3)) vals[b] = std::uniform_real_distribution<double>(-1, 1)(rng);
    std::vector<PotentialPtr> pots{make_zero_potential(2), make_phi_h(Sequence::formula("k+1")),
                                   make_locally_constant(2, 1, vals)};
    std::vector<SubshiftPtr> specs{make_full_shift(2), make_golden_mean(),
                                   make_bounded_density(1, Sequence::formula("ceil(n/2)"), 32),
                                   make_sparse_sturmian(make_sturmian_factors(13, 21, 8), {4, 12})};
    for (const auto& s : specs)
        for (const auto& p : pots) {
            auto t = partition_table(*s, *p, 14, kBudget);
            for (std::int64_t m = 1; m <= 14; ++m)
                for (std::int64_t n = 1; m + n <= 14; ++n) CHECK(t.at(m + n).lnZ_hi <= t.at(m).lnZ_hi + t.at(n).lnZ_hi);
            for (std::int64_t n = 1; n <= 14; ++n) CHECK(t.at(n).lnZ_lo <= t.at(n).lnZ_hi);
        }
}

TEST_CASE("pressure bracket examples") {
    auto zero = make_zero_potential(2);
    auto full = partition_table(*make_full_shift(2), *zero, 20, kBudget);
    auto b = pressure_bracket(full, constant_gap(0), zeros(64), 0.0);
    for (const auto& r : b.rows) {
        CHECK(std::fabs(r.lo - std::log(2.0)) < 1e-12);
        CHECK(std::fabs(r.hi - std::log(2.0)) < 1e-12);
    }
    CHECK(b.consistent);

    auto gm = partition_table(*make_golden_mean(), *zero, 24, kBudget);
    b = pressure_bracket(gm, constant_gap(1), zeros(64), 0.0);
    CHECK(b.best_lo <= std::log(kGolden));
    CHECK(std::log(kGolden) <= b.best_hi);
    CHECK(b.width() < 0.05);

    auto bd = make_bounded_density(1, Sequence::formula("ceil(n/2)"), 64);
    auto bt = partition_table(*bd, *zero, 20, kBudget);
    b = pressure_bracket(bt, bd->declared_gap(), zeros(64), 0.0);
    CHECK(b.width() < 0.1);
    CHECK(b.consistent);
    // the hi column agrees with counts: min_m ln|L_m| / m
    double m_min = 1e9;
    for (std::int64_t n = 1; n <= 20; ++n) m_min = std::min(m_min, std::log(static_cast<double>(bt.at(n).count)) / n);
    CHECK(b.best_hi == doctest::Approx(m_min).epsilon(1e-14));

    // transitivity-only and superset families give upper bounds only
    auto ss = make_sparse_sturmian(make_sturmian_factors(13, 21, 8), {4, 12});
    auto st = partition_table(*ss, *zero, 12, kBudget);
    CHECK(st.upper_bound_only);
    b = pressure_bracket(st, ss->declared_gap(), zeros(64), 0.0);
    CHECK(b.upper_bound_only);
    CHECK(std::isinf(b.best_lo));

    // an absurd declaration (f = 0 on the golden mean) inverts the bracket
    b = pressure_bracket(gm, constant_gap(0), zeros(64), 0.0);
    CHECK_FALSE(b.consistent);
    CHECK_THROWS_AS(ensure_consistent(b), InconsistencyError);
}

TEST_CASE("transfer model examples") {
    auto zero = make_zero_potential(2);
    auto m = build_transfer(*make_full_shift(2), *zero, 1, kBudget);
    CHECK(m.states() == 2);
    CHECK(m.edges() == 4);
    for (double x : m.weight) CHECK(x == 1.0);
    auto g = build_transfer(*make_golden_mean(), *zero, 1, kBudget);
    CHECK(g.dense() == std::vector<std::vector<double>>{{1, 1}, {1, 0}});
    const double t = 3.0;
    auto lc = make_locally_constant(2, 0, {{w("0"), std::log(t)}, {w("1"), 0.0}});
    auto gw = build_transfer(*make_golden_mean(), *lc, 1, kBudget);
    auto d = gw.dense();
    // phi sits at the first symbol of the edge word: rows scale
    CHECK(d[0][0] == doctest::Approx(t));
    CHECK(d[0][1] == doctest::Approx(t));
    CHECK(d[1][0] == doctest::Approx(1.0));

    CHECK_THROWS_AS(build_transfer(*make_full_shift(2), *make_phi_h(Sequence::formula("k+1")), 2, kBudget), InputError);
    CHECK_THROWS_AS(build_transfer(*make_sparse_sturmian(make_sturmian_factors(13, 21, 8), {4, 12}), *zero, 2, kBudget),
                    InputError);
    auto r2 = make_locally_constant(2, 2, {});
    CHECK_THROWS_AS(build_transfer(*make_full_shift(2), *r2, 3, kBudget), InputError);
}

TEST_CASE("perron examples") {
    auto zero = make_zero_potential(2);
    CHECK(perron(build_transfer(*make_full_shift(2), *zero, 1, kBudget)).lambda == doctest::Approx(2.0).epsilon(1e-14));
    auto gm = build_transfer(*make_golden_mean(), *zero, 1, kBudget);
    CHECK(std::fabs(perron(gm).lambda - kGolden) < 1e-9);
    auto lc = make_locally_constant(2, 0, {{w("0"), std::log(2.0)}, {w("1"), 0.0}});
    auto gw = build_transfer(*make_golden_mean(), *lc, 1, kBudget);
    // weighted matrix [[2,2],[1,0]]: lambda^2 - 2 lambda - 2 = 0
    CHECK(std::fabs(perron(gw).lambda - (1 + std::sqrt(3.0))) < 1e-9);
    // larger state blocks give the same Perron value
    CHECK(std::fabs(perron(build_transfer(*make_golden_mean(), *zero, 6, kBudget)).lambda - kGolden) < 1e-9);
    // deterministic
    auto a = perron(gw), b = perron(gw);
    CHECK(a.lambda == b.lambda);
    CHECK(a.right == b.right);
    CHECK(a.left == b.left);
}

TEST_CASE("perron structural cases") {
    auto zero = make_zero_potential(2);
    // period 2: alternating shift
    auto alt = build_transfer(*make_sft(2, {w("00"), w("11")}), *zero, 1, kBudget);
    CHECK(perron(alt).lambda == doctest::Approx(1.0).epsilon(1e-12));
    // 0^Z and 1^Z plus the transition words 1^a 0^b: reducible
    auto two = build_transfer(*make_sft(2, {w("01")}), *zero, 2, kBudget);
    CHECK_THROWS_AS(perron(two), InconsistencyError);
    CHECK(strongly_connected_components(two).size() == 3);
}

TEST_CASE("Markov equilibrium examples") {
    auto zero = make_zero_potential(2);
    auto full = build_transfer(*make_full_shift(2), *zero, 1, kBudget);
    auto mm = markov_equilibrium(full, perron(full));
    CHECK(mm.pi[0] == doctest::Approx(0.5));
    CHECK(mm.entropy == doctest::Approx(std::log(2.0)));
    CHECK(mm.phi_integral == 0.0);
    CHECK(cylinder_measure(mm, full, w("0")) == doctest::Approx(0.5));
    CHECK(cylinder_measure(mm, full, w("011")) == doctest::Approx(0.125));

    auto gm = build_transfer(*make_golden_mean(), *zero, 1, kBudget);
    auto pg = markov_equilibrium(gm, perron(gm));
    CHECK(pg.entropy == doctest::Approx(std::log(kGolden)).epsilon(1e-12));
    // Parry measure: pi(0) = phi^2 / (1 + phi^2), p(0->0) = 1/phi
    CHECK(pg.pi[0] == doctest::Approx(kGolden * kGolden / (1 + kGolden * kGolden)).epsilon(1e-12));
    CHECK(pg.p[0] == doctest::Approx(1 / kGolden).epsilon(1e-12));
    CHECK(cylinder_measure(pg, gm, w("11")) == 0.0);
    CHECK(cylinder_measure(pg, gm, w("010")) == doctest::Approx(pg.pi[0] * (1 / (kGolden * kGolden)) * 1.0).epsilon(1e-12));

    auto lc = make_locally_constant(2, 0, {{w("0"), std::log(2.0)}, {w("1"), 0.0}});
    auto gw = build_transfer(*make_golden_mean(), *lc, 1, kBudget);
    auto pr = perron(gw);
    auto mw = markov_equilibrium(gw, pr);
    CHECK(std::fabs(mw.entropy + mw.phi_integral - std::log(pr.lambda)) <= 1e-8);
    CHECK(mw.stationarity_error <= 1e-10);
}

TEST_CASE("transfer pressure lies in the bracket") {
    std::mt19937_64 rng(9);
    struct Inst {
        SubshiftPtr spec;
        std::int64_t f;
        int radius;
    };
    std::vector<Inst> insts{{make_full_shift(2), 0, 0}, {make_full_shift(2), 0, 1}, {make_golden_mean(), 1, 0},
                            {make_golden_mean(), 1, 1}, {make_full_shift(3), 0, 1}};
    for (const auto& in : insts) {
        std::map<Word, double> vals;
        for (const auto& b : oracle::all_words(in.spec->alphabet_size(), static_cast<std::size_t>(2 * in.radius + 1)))
            vals[b] = std::uniform_real_distribution<double>(-1, 1)(rng);
        auto pot = make_locally_constant(in.spec->alphabet_size(), in.radius, vals);
        auto model = build_transfer(*in.spec, *pot, static_cast<std::size_t>(std::max(1, 2 * in.radius)), kBudget);
        const double P = std::log(perron(model).lambda);
        const std::int64_t N = in.spec->alphabet_size() == 3 ? 10 : 16;
        auto table = partition_table(*in.spec, *pot, N, kBudget);
        auto var = variation_profile(*pot, *in.spec, N, kBudget);
        auto b = pressure_bracket(table, constant_gap(in.f), var.g, pot->range().lo);
        CHECK(b.best_lo <= P);
        CHECK(P <= b.best_hi);
    }
}

TEST_CASE("anchor sequences") {
    auto zero = [](std::int64_t) { return 0.0; };
    auto a = anchor_sequence([](std::int64_t) { return 1.0; }, zero, 1000, {1.0, 0.5, 0.25});
    REQUIRE(a.anchors.size() == 3);
    CHECK(a.anchors[0].n == 3);     // 1/ln 3 < 1
    CHECK(a.anchors[1].n == 8);     // ln 8 > 2 > ln 7
    CHECK(a.anchors[2].n == 55);    // ln 55 > 4 > ln 54

    auto b = anchor_sequence([](std::int64_t n) { return std::ceil(std::sqrt(std::log(static_cast<double>(n)))); }, zero,
                             1 << 20, {1.0, 0.5, 0.3});
    REQUIRE(b.anchors.size() == 3);
    for (std::size_t i = 1; i < b.anchors.size(); ++i) {
        CHECK(b.anchors[i].score <= b.anchors[i - 1].score);
        CHECK(b.anchors[i].n > b.anchors[i - 1].n);
    }
    auto c = anchor_sequence([](std::int64_t n) { return std::ceil(std::log(static_cast<double>(n))); }, zero, 1 << 16,
                             {0.99, 0.5});
    CHECK_FALSE(c.witnessed());
    CHECK_THROWS_AS(anchor_sequence(zero, zero, 100, {0.5, 0.5}), InputError);
}
