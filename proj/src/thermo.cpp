#include "symdyn/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "symdyn/error.hpp"

namespace symdyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

const PartitionRow& PartitionTable::at(std::int64_t n) const {
    if (n < 1 || n > n_max()) throw InputError(fmt::format("partition table has no row for n={} (rows 1..{})", n, n_max()));
    return rows[static_cast<std::size_t>(n - 1)];
}

PartitionRow partition_function(const Subshift& spec, const Potential& pot, std::int64_t n, std::uint64_t budget) {
    if (n < 1) throw InputError("partition function needs n >= 1");
    PartitionRow row;
    row.n = n;
    if (pot.is_zero()) {
        row.count = count_language(spec, static_cast<std::size_t>(n), budget);
        if (row.count == 0) throw InputError(fmt::format("language of length {} is empty", n));
        double l = std::log(static_cast<double>(row.count));
        row.lnZ_lo = row.count == 1 ? 0.0 : round_down(l);
        row.lnZ_hi = row.count == 1 ? 0.0 : round_up(l);
        return row;
    }
    std::vector<double> lo, hi;
    for_each_word(spec, static_cast<std::size_t>(n), budget, [&](SymbolView w) {
        Interval s = pot.sum(w);
        lo.push_back(s.lo);
        hi.push_back(s.hi);
    });
    row.count = lo.size();
    if (row.count == 0) throw InputError(fmt::format("language of length {} is empty", n));
    row.lnZ_lo = LogSumExp::lower(lo);
    row.lnZ_hi = LogSumExp::upper(hi);
    return row;
}

PartitionTable partition_table(const Subshift& spec, const Potential& pot, std::int64_t n_max, std::uint64_t budget) {
    PartitionTable t;
    t.upper_bound_only = spec.exactness() != Exactness::ExactLanguage;
    for (std::int64_t n = 1; n <= n_max; ++n) t.rows.push_back(partition_function(spec, pot, n, budget));
    return t;
}

PressureBracket pressure_bracket(const PartitionTable& table, const std::optional<GapBound>& f,
                                 const std::vector<double>& g, double inf_phi, double tolerance) {
    const std::int64_t N = table.n_max();
    if (N < 1) throw InputError("pressure bracket needs a nonempty partition table");
    PressureBracket b;
    const bool has_lower = f && f->mode == GapMode::Specification && !table.upper_bound_only;
    b.upper_bound_only = !has_lower;
    b.f_description = f ? f->description : "none";
    if (has_lower && static_cast<std::int64_t>(g.size()) <= N)
        throw InputError(fmt::format("variation bound g covers n <= {}, bracket horizon is {}", g.size() - 1, N));
    b.best_lo = -kInf;
    b.best_hi = kInf;
    double running_hi = kInf;
    for (std::int64_t n = 1; n <= N; ++n) {
        const auto& row = table.at(n);
        BracketRow br;
        br.n = n;
        const double ratio = round_up(row.lnZ_hi / static_cast<double>(n));
        running_hi = std::fmin(running_hi, row.lnZ_hi == 0 ? 0.0 : ratio);
        br.hi = running_hi;
        br.lo = -kInf;
        if (has_lower) {
            br.f = (*f)(n);
            if (br.f < 0) throw InputError(fmt::format("declared gap bound f({}) = {} is negative", n, br.f));
            br.g = g[static_cast<std::size_t>(n)];
            const double fd = static_cast<double>(br.f);
            double num = row.lnZ_lo;
            if (br.f != 0 && inf_phi != 0) num = round_down(num + round_down(inf_phi * fd));
            if (br.g != 0) num = round_down(num - br.g);
            const double den = static_cast<double>(n) + fd;
            double q = num / den;
            if (q * den != num) q = round_down(q);
            br.lo = q;
        }
        if (br.lo > b.best_lo) {
            b.best_lo = br.lo;
            b.best_lo_n = n;
        }
        if (br.hi < b.best_hi) {
            b.best_hi = br.hi;
            b.best_hi_n = n;
        }
        b.rows.push_back(br);
    }
    b.consistent = b.best_lo <= b.best_hi + tolerance;
    return b;
}

void ensure_consistent(const PressureBracket& b) {
    if (b.consistent) return;
    throw InconsistencyError(fmt::format(
        "pressure bracket inverted: lower bound {:.17g} (n={}) exceeds upper bound {:.17g} (n={}); "
        "the declared gap bound f = {} is falsified",
        b.best_lo, b.best_lo_n, b.best_hi, b.best_hi_n, b.f_description));
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> TransferModel::state_index(SymbolView block) const {
    if (block.size() != n_state) return std::nullopt;
    const auto code = encode(block, alphabet_size);
    auto it = std::lower_bound(state_codes.begin(), state_codes.end(), code);
    if (it == state_codes.end() || *it != code) return std::nullopt;
    return static_cast<std::size_t>(it - state_codes.begin());
}

Word TransferModel::state_word(std::size_t i) const {
    std::vector<Symbol> buf(n_state);
    decode(state_codes[i], alphabet_size, buf);
    return Word(std::move(buf));
}

std::vector<std::vector<double>> TransferModel::dense() const {
    std::vector<std::vector<double>> m(states(), std::vector<double>(states(), 0.0));
    for (std::size_t u = 0; u < states(); ++u)
        for (std::size_t e = row_ptr[u]; e < row_ptr[u + 1]; ++e) m[u][col[e]] = weight[e];
    return m;
}

TransferModel build_transfer(const Subshift& spec, const Potential& pot, std::size_t n_state, std::uint64_t budget) {
    if (spec.exactness() != Exactness::ExactLanguage)
        throw InputError("transfer model needs an exact language; use the pressure bracket for superset families");
    const auto r = pot.radius();
    if (!r)
        throw InputError("transfer model needs a locally constant potential; use the pressure bracket for " +
                         to_string(pot.kind()) + " potentials");
    if (const auto* lc = dynamic_cast<const LocallyConstantPotential*>(&pot); lc && lc->alphabet_size() != spec.alphabet_size())
        throw InputError("potential alphabet does not match the subshift alphabet");
    if (n_state < 1 || n_state < static_cast<std::size_t>(2 * *r))
        throw InputError(fmt::format("state block length {} must be at least max(1, 2r) = {}", n_state, std::max(1, 2 * *r)));
    if (!code_fits(spec.alphabet_size(), n_state + 1)) throw InputError("state block length too large");

    TransferModel m;
    m.alphabet_size = spec.alphabet_size();
    m.n_state = n_state;
    m.radius = *r;
    const auto lang = enumerate_language(spec, n_state, budget);
    if (lang.empty()) throw InputError("transfer model: empty language");
    if (lang.size() > (std::size_t{1} << 24)) throw InputError("transfer model: too many states");
    for (std::size_t i = 0; i < lang.size(); ++i) m.state_codes.push_back(encode(lang[i], m.alphabet_size));
    m.row_ptr.push_back(0);
    std::vector<Symbol> joined(n_state + 1);
    for (std::size_t u = 0; u < lang.size(); ++u) {
        std::copy(lang[u].begin(), lang[u].end(), joined.begin());
        for (int a = 0; a < m.alphabet_size; ++a) {
            joined[n_state] = static_cast<Symbol>(a);
            if (!spec.admissible(joined)) continue;
            auto v = m.state_index(SymbolView(joined).subspan(1));
            if (!v) continue;
            Interval phi = pot.eval(joined, static_cast<std::size_t>(*r));
            if (!phi.is_point()) throw InputError("potential is not determined on state blocks");
            m.col.push_back(static_cast<std::uint32_t>(*v));
            m.phi.push_back(phi.lo);
            m.weight.push_back(std::exp(phi.lo));
        }
        m.row_ptr.push_back(m.col.size());
    }
    return m;
}

std::vector<std::vector<std::size_t>> strongly_connected_components(const TransferModel& m) {
    // Iterative Tarjan.
    const std::size_t N = m.states();
    constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(N, kUnset), low(N, 0);
    std::vector<char> on_stack(N, 0);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> call;  // (node, next edge)
    std::vector<std::vector<std::size_t>> comps;
    std::size_t counter = 0;
    for (std::size_t s = 0; s < N; ++s) {
        if (index[s] != kUnset) continue;
        call.emplace_back(s, m.row_ptr[s]);
        index[s] = low[s] = counter++;
        stack.push_back(s);
        on_stack[s] = 1;
        while (!call.empty()) {
            auto& [u, e] = call.back();
            if (e < m.row_ptr[u + 1]) {
                const std::size_t v = m.col[e++];
                if (index[v] == kUnset) {
                    index[v] = low[v] = counter++;
                    stack.push_back(v);
                    on_stack[v] = 1;
                    call.emplace_back(v, m.row_ptr[v]);
                } else if (on_stack[v]) {
                    low[u] = std::min(low[u], index[v]);
                }
                continue;
            }
            const std::size_t done = u;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
            if (low[done] == index[done]) {
                std::vector<std::size_t> comp;
                std::size_t x;
                do {
                    x = stack.back();
                    stack.pop_back();
                    on_stack[x] = 0;
                    comp.push_back(x);
                } while (x != done);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
        }
    }
    std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return comps;
}

namespace {

std::size_t graph_period(const TransferModel& m) {
    const std::size_t N = m.states();
    std::vector<std::int64_t> level(N, -1);
    std::vector<std::size_t> queue{0};
    level[0] = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const std::size_t u = queue[qi];
        for (std::size_t e = m.row_ptr[u]; e < m.row_ptr[u + 1]; ++e) {
            if (level[m.col[e]] < 0) {
                level[m.col[e]] = level[u] + 1;
                queue.push_back(m.col[e]);
            }
        }
    }
    std::int64_t d = 0;
    for (std::size_t u = 0; u < N; ++u)
        for (std::size_t e = m.row_ptr[u]; e < m.row_ptr[u + 1]; ++e)
            d = std::gcd(d, std::llabs(level[u] + 1 - level[m.col[e]]));
    return static_cast<std::size_t>(d);
}

// y = M x (transpose when `left`).
void apply(const TransferModel& m, const std::vector<double>& x, std::vector<double>& y, bool left) {
    const std::size_t N = m.states();
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t u = 0; u < N; ++u) {
        if (left) {
            for (std::size_t e = m.row_ptr[u]; e < m.row_ptr[u + 1]; ++e) y[m.col[e]] += m.weight[e] * x[u];
        } else {
            double s = 0;
            for (std::size_t e = m.row_ptr[u]; e < m.row_ptr[u + 1]; ++e) s += m.weight[e] * x[m.col[e]];
            y[u] = s;
        }
    }
}

struct Iterated {
    std::vector<double> v;
    double lambda = 0;
    double residual = 0;
    int iterations = 0;
    bool converged = false;
};

Iterated power_iterate(const TransferModel& m, bool left, double shift, double tol, int max_iter) {
    const std::size_t N = m.states();
    Iterated it;
    it.v.assign(N, 1.0);
    std::vector<double> z(N);
    for (it.iterations = 1; it.iterations <= max_iter; ++it.iterations) {
        apply(m, it.v, z, left);
        double num = 0, den = 0;
        for (std::size_t i = 0; i < N; ++i) {
            num += z[i] * it.v[i];
            den += it.v[i] * it.v[i];
        }
        it.lambda = num / den;
        double res = 0;
        for (std::size_t i = 0; i < N; ++i) res = std::fmax(res, std::fabs(z[i] - it.lambda * it.v[i]));
        it.residual = res;
        if (res <= tol * it.lambda) {
            it.converged = true;
            return it;
        }
        double norm = 0;
        for (std::size_t i = 0; i < N; ++i) {
            z[i] += shift * it.v[i];
            norm = std::fmax(norm, std::fabs(z[i]));
        }
        for (std::size_t i = 0; i < N; ++i) it.v[i] = z[i] / norm;
    }
    it.iterations = max_iter;
    return it;
}

} // namespace

PerronResult perron(const TransferModel& m, double tol, int max_iter) {
    const std::size_t N = m.states();
    if (N == 0) throw InputError("perron: model has no states");
    auto comps = strongly_connected_components(m);
    if (comps.size() > 1) {
        std::string desc;
        for (std::size_t i = 0; i < comps.size() && i < 8; ++i)
            desc += fmt::format("{}{{size {}, e.g. {}}}", i ? ", " : "", comps[i].size(), to_string(m.state_word(comps[i].front())));
        throw InconsistencyError(fmt::format("transfer graph is reducible: {} strongly connected components: {}{}",
                                             comps.size(), desc, comps.size() > 8 ? ", ..." : ""));
    }
    PerronResult pr;
    if (graph_period(m) != 1) {
        double max_row = 0;
        for (std::size_t u = 0; u < N; ++u) {
            double s = 0;
            for (std::size_t e = m.row_ptr[u]; e < m.row_ptr[u + 1]; ++e) s += m.weight[e];
            max_row = std::fmax(max_row, s);
        }
        pr.shift = 0.5 * max_row;
    }
    auto right = power_iterate(m, false, pr.shift, tol, max_iter);
    if (!right.converged)
        throw InconsistencyError(fmt::format("power iteration did not converge in {} steps (residual {:.3g})", max_iter,
                                             right.residual / right.lambda));
    auto left = power_iterate(m, true, pr.shift, tol, max_iter);
    if (!left.converged)
        throw InconsistencyError(fmt::format("left power iteration did not converge in {} steps (residual {:.3g})",
                                             max_iter, left.residual / left.lambda));
    pr.lambda = right.lambda;
    pr.residual = right.residual;
    pr.left_residual = left.residual;
    pr.iterations = right.iterations + left.iterations;
    double dot = 0;
    for (std::size_t i = 0; i < N; ++i) dot += left.v[i] * right.v[i];
    pr.right = std::move(right.v);
    pr.left = std::move(left.v);
    for (double& x : pr.left) x /= dot;
    return pr;
}

MarkovMeasure markov_equilibrium(const TransferModel& m, const PerronResult& pr, double identity_tol,
                                 double stationarity_tol) {
    const std::size_t N = m.states();
    if (pr.right.size() != N || pr.left.size() != N) throw InputError("Perron data does not match the model");
    MarkovMeasure mm;
    mm.lambda = pr.lambda;
    mm.p.assign(m.edges(), 0.0);
    for (std::size_t u = 0; u < N; ++u) {
        // Rows are renormalized to absorb the Perron residual.
        double row = 0;
        for (std::size_t e = m.row_ptr[u]; e < m.row_ptr[u + 1]; ++e) {
            mm.p[e] = m.weight[e] * pr.right[m.col[e]] / (pr.lambda * pr.right[u]);
            row += mm.p[e];
        }
        for (std::size_t e = m.row_ptr[u]; e < m.row_ptr[u + 1]; ++e) mm.p[e] /= row;
    }
    mm.pi.resize(N);
    double total = 0;
    for (std::size_t u = 0; u < N; ++u) total += (mm.pi[u] = pr.left[u] * pr.right[u]);
    for (double& x : mm.pi) x /= total;

    std::vector<double> flow(N, 0.0);
    double h = 0, integral = 0;
    for (std::size_t u = 0; u < N; ++u) {
        double hu = 0, iu = 0;
        for (std::size_t e = m.row_ptr[u]; e < m.row_ptr[u + 1]; ++e) {
            const double p = mm.p[e];
            if (p > 0) hu -= p * std::log(p);
            iu += p * m.phi[e];
            flow[m.col[e]] += mm.pi[u] * p;
        }
        h += mm.pi[u] * hu;
        integral += mm.pi[u] * iu;
    }
    mm.entropy = h;
    mm.phi_integral = integral;
    for (std::size_t u = 0; u < N; ++u) mm.stationarity_error += std::fabs(flow[u] - mm.pi[u]);
    mm.identity_error = std::fabs(h + integral - std::log(pr.lambda));
    if (mm.identity_error > identity_tol)
        throw InconsistencyError(fmt::format("variational identity violated: entropy + integral - ln lambda = {:.3g}",
                                             h + integral - std::log(pr.lambda)));
    if (mm.stationarity_error > stationarity_tol)
        throw InconsistencyError(fmt::format("stationarity violated: ||pi p - pi||_1 = {:.3g}", mm.stationarity_error));
    return mm;
}

double cylinder_measure(const MarkovMeasure& mm, const TransferModel& m, SymbolView a) {
    check_symbols(a, m.alphabet_size);
    if (a.empty()) return 1.0;
    if (a.size() <= m.n_state) {
        std::uint64_t span = 1;
        for (std::size_t i = a.size(); i < m.n_state; ++i) span *= static_cast<std::uint64_t>(m.alphabet_size);
        const std::uint64_t lo = encode(a, m.alphabet_size) * span, hi = lo + span;
        auto first = std::lower_bound(m.state_codes.begin(), m.state_codes.end(), lo);
        auto last = std::lower_bound(m.state_codes.begin(), m.state_codes.end(), hi);
        double s = 0;
        for (auto it = first; it != last; ++it) s += mm.pi[static_cast<std::size_t>(it - m.state_codes.begin())];
        return s;
    }
    auto u = m.state_index(a.first(m.n_state));
    if (!u) return 0.0;
    double mu = mm.pi[*u];
    for (std::size_t i = 1; i + m.n_state <= a.size(); ++i) {
        auto v = m.state_index(a.subspan(i, m.n_state));
        if (!v) return 0.0;
        double p = 0;
        for (std::size_t e = m.row_ptr[*u]; e < m.row_ptr[*u + 1]; ++e)
            if (m.col[e] == *v) p = mm.p[e];
        mu *= p;
        u = v;
    }
    return mu;
}

// ---------------------------------------------------------------------------

AnchorSequence anchor_sequence(const std::function<double(std::int64_t)>& f,
                               const std::function<double(std::int64_t)>& g, std::int64_t horizon,
                               const std::vector<double>& epsilons) {
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0)) throw InputError("anchor epsilons must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw InputError("anchor epsilons must be strictly decreasing");
    }
    AnchorSequence out;
    std::int64_t n = 3;
    double prev_score = kInf;
    for (double eps : epsilons) {
        const double cap = std::fmin(eps, prev_score);
        bool found = false;
        for (; n <= horizon; ++n) {
            const double score = (f(n) + g(n)) / std::log(static_cast<double>(n));
            if (score <= cap) {
                out.anchors.push_back({eps, n, score});
                prev_score = score;
                ++n;
                found = true;
                break;
            }
        }
        if (!found) break;
    }
    return out;
}

} // namespace symdyn
