#include "symdyn/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "symdyn/error.hpp"

namespace symdyn {

std::string to_string(PotentialKind k) {
    switch (k) {
    case PotentialKind::LocallyConstant: return "locally_constant";
    case PotentialKind::PhiH: return "phi_h";
    case PotentialKind::Level: return "level";
    }
    return "?";
}

std::string to_string(Growth g) {
    switch (g) {
    case Growth::Bounded: return "bounded";
    case Growth::Sublog: return "sublog";
    case Growth::LogLinear: return "log_linear";
    case Growth::Superlog: return "superlog";
    }
    return "?";
}

std::string GrowthReport::label() const {
    if (growth == Growth::LogLinear) return fmt::format("log_linear({:.3f})", slope);
    return to_string(growth);
}

Interval Potential::sum(SymbolView w) const {
    Interval s = Interval::point(0);
    for (std::size_t i = 0; i < w.size(); ++i) s += eval(w, i);
    return s;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t ipow(std::uint64_t a, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) r *= a;
    return r;
}

} // namespace

LocallyConstantPotential::LocallyConstantPotential(int alphabet_size, int radius, std::vector<double> table)
    : Potential(PotentialKind::LocallyConstant, fmt::format("locally constant, radius {}", radius)),
      alphabet_size_(alphabet_size), radius_(radius), table_(std::move(table)) {
    const int block = 2 * radius + 1;
    if (radius < 0) throw ConstructionError("potential radius must be nonnegative");
    if (!code_fits(alphabet_size, static_cast<std::size_t>(block)) ||
        std::pow(alphabet_size, block) > double(1 << 22))
        throw ConstructionError("locally constant potential table too large");
    const auto a = static_cast<std::uint64_t>(alphabet_size);
    if (table_.size() != ipow(a, block)) throw ConstructionError("locally constant table has the wrong size");
    for (double v : table_)
        if (!std::isfinite(v)) throw ConstructionError("locally constant potential values must be finite");
    auto [mn, mx] = std::minmax_element(table_.begin(), table_.end());
    range_ = {*mn, *mx};

    envelopes_.assign(static_cast<std::size_t>(radius) + 1,
                      std::vector<std::vector<Interval>>(static_cast<std::size_t>(radius) + 1));
    for (int left = 0; left <= radius; ++left) {
        for (int right = 0; right <= radius; ++right) {
            if (left == 0 && right == 0) continue;
            const int known = block - left - right;
            auto& env = envelopes_[static_cast<std::size_t>(left)][static_cast<std::size_t>(right)];
            env.assign(ipow(a, known), Interval{std::numeric_limits<double>::infinity(),
                                                -std::numeric_limits<double>::infinity()});
            const std::uint64_t right_span = ipow(a, right);
            const std::uint64_t known_span = ipow(a, known);
            for (std::uint64_t code = 0; code < table_.size(); ++code) {
                std::uint64_t mid = (code / right_span) % known_span;
                auto& slot = env[mid];
                slot.lo = std::fmin(slot.lo, table_[code]);
                slot.hi = std::fmax(slot.hi, table_[code]);
            }
        }
    }
}

double LocallyConstantPotential::value(SymbolView block) const { return table_[encode(block, alphabet_size_)]; }

Interval LocallyConstantPotential::partial(SymbolView known, int left, int right) const {
    if (left == 0 && right == 0) return Interval::point(value(known));
    return envelopes_[static_cast<std::size_t>(left)][static_cast<std::size_t>(right)][encode(known, alphabet_size_)];
}

Interval LocallyConstantPotential::eval(SymbolView w, std::size_t center) const {
    const auto r = static_cast<std::size_t>(radius_);
    const std::size_t avail_left = center;
    const std::size_t avail_right = w.size() - 1 - center;
    const std::size_t kl = std::min(r, avail_left), kr = std::min(r, avail_right);
    return partial(w.subspan(center - kl, kl + kr + 1), static_cast<int>(r - kl), static_cast<int>(r - kr));
}

Interval LocallyConstantPotential::sum(SymbolView w) const {
    Interval s = Interval::point(0);
    if (is_zero()) return s;
    for (std::size_t i = 0; i < w.size(); ++i) s += eval(w, i);
    return s;
}

// ---------------------------------------------------------------------------

RunLevelPotential::RunLevelPotential(PotentialKind kind, std::string description, Sequence level, double a_inf)
    : Potential(kind, std::move(description)), level_(std::move(level)), a_inf_(a_inf), last_(level_.last_index()) {
    if (level_.first_index() > 0) throw ConstructionError("level table must start at k = 0");
    if (!std::isfinite(a_inf_)) throw ConstructionError("limit value must be finite");
}

double RunLevelPotential::level(std::int64_t k) const { return level_.at(k); }

void RunLevelPotential::finish(std::int64_t horizon) {
    const std::int64_t top = last_ ? std::min(*last_, horizon) : horizon;
    std::vector<double> vals(static_cast<std::size_t>(top) + 1);
    for (std::int64_t k = 0; k <= top; ++k) {
        vals[static_cast<std::size_t>(k)] = level_.at(k);
        if (!std::isfinite(vals[static_cast<std::size_t>(k)]))
            throw ConstructionError(fmt::format("level value at k={} is not finite", k));
    }
    // Monotone toward a_inf: either non-increasing with a_inf below, or non-decreasing with a_inf above.
    bool down = vals.front() >= a_inf_;
    for (std::size_t k = 0; k < vals.size(); ++k) {
        bool ok = down ? (vals[k] >= a_inf_ && (k == 0 || vals[k] <= vals[k - 1]))
                       : (vals[k] <= a_inf_ && (k == 0 || vals[k] >= vals[k - 1]));
        if (!ok)
            throw ConstructionError(fmt::format("level values must be monotone toward the limit; violated at k={}", k));
    }
    range_ = {std::fmin(vals.front(), a_inf_), std::fmax(vals.front(), a_inf_)};

    std::vector<double> partial(vals.size(), 0);
    double s = 0;
    for (std::size_t k = 0; k < vals.size(); ++k) {
        s += std::fabs(vals[k] - a_inf_);
        partial[k] = s;
    }
    non_bowen_ = top >= 16 && growth_class(partial, top).growth != Growth::Bounded;
}

Interval RunLevelPotential::level_hull(std::int64_t k_lo, std::optional<std::int64_t> k_hi) const {
    double first = (last_ && k_lo > *last_) ? level_.at(*last_) : level_.at(k_lo);
    Interval out = Interval::point(first);
    if (!k_hi || (last_ && *k_hi > *last_) || (last_ && k_lo > *last_)) {
        out = hull(out, Interval::point(a_inf_));
    } else {
        out = hull(out, Interval::point(level_.at(*k_hi)));
    }
    return out;
}

double RunLevelPotential::constant_block_width(std::int64_t n) const { return level_hull(n, std::nullopt).width(); }

Interval RunLevelPotential::eval(SymbolView w, std::size_t center) const {
    const Symbol s = w[center];
    std::size_t left = 0, right = 0;
    while (left < center && w[center - left - 1] == s) ++left;
    while (center + right + 1 < w.size() && w[center + right + 1] == s) ++right;
    const bool left_open = left == center;
    const bool right_open = center + right + 1 == w.size();
    const auto k_lo = static_cast<std::int64_t>(std::min(left, right));
    std::optional<std::int64_t> k_hi;
    if (!left_open && !right_open) k_hi = k_lo;
    else if (!left_open) k_hi = static_cast<std::int64_t>(left);
    else if (!right_open) k_hi = static_cast<std::int64_t>(right);
    return level_hull(k_lo, k_hi);
}

Interval RunLevelPotential::sum(SymbolView w) const {
    const std::size_t n = w.size();
    std::vector<std::size_t> left(n, 0), right(n, 0);
    for (std::size_t i = 1; i < n; ++i) left[i] = w[i] == w[i - 1] ? left[i - 1] + 1 : 0;
    for (std::size_t i = n - 1; i-- > 0;) right[i] = w[i] == w[i + 1] ? right[i + 1] + 1 : 0;
    Interval s = Interval::point(0);
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_open = left[i] == i;
        const bool right_open = i + right[i] + 1 == n;
        const auto k_lo = static_cast<std::int64_t>(std::min(left[i], right[i]));
        std::optional<std::int64_t> k_hi;
        if (!left_open && !right_open) k_hi = k_lo;
        else if (!left_open) k_hi = static_cast<std::int64_t>(left[i]);
        else if (!right_open) k_hi = static_cast<std::int64_t>(right[i]);
        s += level_hull(k_lo, k_hi);
    }
    return s;
}

namespace {

Sequence reciprocal_of(const Sequence& h, std::int64_t horizon) {
    const std::int64_t top = h.last_index() ? *h.last_index() : horizon;
    if (h.first_index() > 0) throw ConstructionError("h must be defined from k = 0");
    std::vector<double> inv(static_cast<std::size_t>(top) + 1);
    double prev = 0;
    for (std::int64_t k = 0; k <= top; ++k) {
        double v = h.at(k);
        if (!(v > 0)) throw ConstructionError(fmt::format("h({}) must be positive", k));
        if (k > 0 && v < prev) throw ConstructionError(fmt::format("h must be increasing; h({}) < h({})", k, k - 1));
        prev = v;
        inv[static_cast<std::size_t>(k)] = 1.0 / v;
    }
    return Sequence::list(std::move(inv), 0);
}

} // namespace

PhiHPotential::PhiHPotential(Sequence h)
    : RunLevelPotential(PotentialKind::PhiH, "phi_h, h(k) = " + h.description(), reciprocal_of(h, kPotentialHorizon),
                        0.0),
      h_(std::move(h)) {
    // A formula h is tabulated to the horizon; beyond it values are only
    // known to lie between 1/h(horizon) and 0, which level_hull handles.
    finish(kPotentialHorizon);
}

LevelPotential::LevelPotential(Sequence a, double a_inf)
    : RunLevelPotential(PotentialKind::Level, "level, a(k) = " + a.description(), std::move(a), a_inf) {
    finish(kPotentialHorizon);
}

// ---------------------------------------------------------------------------

Interval eval_phi(const Potential& pot, SymbolView w, std::size_t center) {
    if (center >= w.size()) throw InputError("eval_phi: center outside the word");
    return pot.eval(w, center);
}

Interval partial_sum(const Potential& pot, SymbolView w) {
    if (w.empty()) throw InputError("partial_sum: empty word");
    return pot.sum(w);
}

std::shared_ptr<const LocallyConstantPotential> make_locally_constant(int alphabet_size, int radius,
                                                                      const std::map<Word, double>& values,
                                                                      double default_value) {
    const int block = 2 * radius + 1;
    if (radius < 0 || !code_fits(alphabet_size, static_cast<std::size_t>(block)))
        throw ConstructionError("locally constant potential: bad radius");
    std::vector<double> table(ipow(static_cast<std::uint64_t>(alphabet_size), block), default_value);
    for (const auto& [w, v] : values) {
        if (w.size() != static_cast<std::size_t>(block))
            throw ConstructionError(fmt::format("locally constant potential: block '{}' must have length {}",
                                                to_string(w), block));
        check_symbols(w, alphabet_size);
        table[encode(w, alphabet_size)] = v;
    }
    return std::make_shared<LocallyConstantPotential>(alphabet_size, radius, std::move(table));
}

std::shared_ptr<const LocallyConstantPotential> make_zero_potential(int alphabet_size) {
    return make_locally_constant(alphabet_size, 0, {}, 0.0);
}

std::shared_ptr<const PhiHPotential> make_phi_h(Sequence h) { return std::make_shared<PhiHPotential>(std::move(h)); }

std::shared_ptr<const LevelPotential> make_level_potential(Sequence a, double a_inf) {
    return std::make_shared<LevelPotential>(std::move(a), a_inf);
}

// ---------------------------------------------------------------------------

VarProfile variation_profile(const Potential& pot, const Subshift& spec, std::int64_t n_max, std::uint64_t budget,
                             bool force_enumeration) {
    if (n_max < 0) throw InputError("variation profile horizon must be nonnegative");
    VarProfile out;
    out.var.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    const auto* run = dynamic_cast<const RunLevelPotential*>(&pot);
    const auto r = pot.radius();
    for (std::int64_t n = 0; n <= n_max; ++n) {
        double& v = out.var[static_cast<std::size_t>(n)];
        const auto len = static_cast<std::size_t>(2 * n + 1);
        if (!force_enumeration && run) {
            // Only constant blocks leave k undetermined.
            bool any = false;
            for (int a = 0; a < spec.alphabet_size() && !any; ++a)
                any = spec.admissible(repeat(static_cast<Symbol>(a), len));
            v = any ? run->constant_block_width(n) : 0.0;
            continue;
        }
        if (!force_enumeration && r && n >= *r) {
            v = 0.0;
            continue;
        }
        for_each_word(spec, len, budget, [&](SymbolView w) { v = std::fmax(v, pot.eval(w, static_cast<std::size_t>(n)).width()); });
    }
    out.g = g_from_var(out.var);
    return out;
}

std::vector<double> g_from_var(const std::vector<double>& var) {
    if (var.empty()) return {};
    std::vector<double> g(2 * var.size(), 0.0);
    double s = 0;
    for (std::size_t i = 0; i < var.size(); ++i) {
        double t = s + var[i];
        if (t - s != var[i]) t = round_up(t);
        s = t;
        g[2 * i] = 2 * s;
        g[2 * i + 1] = 2 * s;
    }
    return g;
}

GrowthReport growth_class(const std::vector<double>& g, std::int64_t horizon) {
    if (horizon < 16) throw InputError("growth_class needs horizon >= 16");
    if (static_cast<std::int64_t>(g.size()) <= horizon)
        throw InputError(fmt::format("growth_class: table has {} entries, horizon {}", g.size(), horizon));
    GrowthReport rep;
    const auto at = [&](std::int64_t n) { return g[static_cast<std::size_t>(n)]; };
    const double lh = std::log(static_cast<double>(horizon));

    // Diagnostic ratio on log-spaced points from 2 to the horizon.
    std::int64_t last = 0;
    for (int i = 0; i <= 48; ++i) {
        auto n = static_cast<std::int64_t>(std::llround(std::exp(std::log(2.0) + (lh - std::log(2.0)) * i / 48)));
        if (n <= last) continue;
        last = n;
        rep.ratio.emplace_back(n, at(n) / std::log(static_cast<double>(n)));
    }

    // Tail from sqrt(horizon) to horizon.
    const double l0 = lh / 2;
    std::vector<std::int64_t> tail;
    for (int i = 0; i <= 64; ++i) {
        auto n = static_cast<std::int64_t>(std::llround(std::exp(l0 + (lh - l0) * i / 64)));
        n = std::clamp<std::int64_t>(n, 3, horizon);
        if (tail.empty() || n > tail.back()) tail.push_back(n);
    }
    const double rise = at(horizon) - at(tail.front());
    if (std::fabs(rise) <= 0.02 * std::fmax(1.0, std::fabs(at(horizon)))) {
        rep.growth = Growth::Bounded;
        return rep;
    }
    auto slope = [&](std::size_t from, std::size_t to) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const auto m = static_cast<double>(to - from);
        for (std::size_t i = from; i < to; ++i) {
            double x = std::log(static_cast<double>(tail[i])), y = at(tail[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double den = m * sxx - sx * sx;
        return den == 0 ? 0.0 : (m * sxy - sx * sy) / den;
    };
    const std::size_t mid = tail.size() / 2;
    rep.slope = slope(0, tail.size());
    const double c1 = slope(0, mid + 1), c2 = slope(mid, tail.size());
    if (c2 > 1.25 * c1 + 1e-9) rep.growth = Growth::Superlog;
    else if (c2 < 0.9 * c1 || rep.slope < 0.05) rep.growth = Growth::Sublog;
    else rep.growth = Growth::LogLinear;
    return rep;
}

} // namespace symdyn
