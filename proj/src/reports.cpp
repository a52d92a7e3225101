#include "symdyn/reports.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>

#include <fmt/format.h>

#include "symdyn/error.hpp"
#include "symdyn/thermo.hpp"

namespace symdyn {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
    return fmt::format("{:.17g}", x);
}

ExitCode exit_code_for(BoundVerdict v) {
    switch (v) {
    case BoundVerdict::Pass: return ExitCode::Ok;
    case BoundVerdict::Fail: return ExitCode::Fail;
    case BoundVerdict::PreconditionFail: return ExitCode::PreconditionFail;
    }
    return ExitCode::Internal;
}

std::vector<std::string> command_names() {
    return {"enumerate", "pressure", "gap-profile", "verify", "equilibrium", "anchors"};
}

ojson report_json(const BoundReport& rep, const std::string& digest) {
    ojson margins = ojson::array();
    for (const auto& m : rep.margins) {
        ojson row = {{"n", m.n}, {"margin", m.value}};
        if (m.anchor) row["anchor"] = m.anchor;
        margins.push_back(row);
    }
    const double mn = rep.min_margin();
    return {{"theorem_tag", to_string(rep.tag)},
            {"verdict", to_string(rep.verdict)},
            {"tolerance", rep.tolerance},
            {"min_margin", std::isfinite(mn) ? ojson(mn) : ojson(nullptr)},
            {"margins", margins},
            {"witnesses", rep.witnesses},
            {"extras", rep.extras},
            {"message", rep.message},
            {"config_digest", digest}};
}

namespace {

// Files produced by one command, kept in memory until the command finishes.
using Payloads = std::map<std::string, std::string>;

struct Csv {
    std::string text;
    explicit Csv(const std::string& header) : text(header + "\n") {}
    template <class... T>
    void row(const T&... cells) {
        std::string line;
        ((line += (line.empty() ? "" : ",") + cell(cells)), ...);
        text += line + "\n";
    }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(double x) { return format_real(x); }
    static std::string cell(bool b) { return b ? "true" : "false"; }
    template <class I, class = std::enable_if_t<std::is_integral_v<I>>>
    static std::string cell(I v) { return std::to_string(v); }
};

std::optional<std::size_t> markov_memory(const Subshift& s) {
    switch (s.family()) {
    case Family::Full: return 1;
    case Family::Sft: return dynamic_cast<const SftShift&>(s).memory();
    case Family::Product: {
        const auto& p = dynamic_cast<const ProductShift&>(s);
        auto a = markov_memory(*p.first()), b = markov_memory(*p.second());
        if (a && b) return std::max(*a, *b);
        return std::nullopt;
    }
    default: return std::nullopt;
    }
}

// Lazily computed tables shared by the operations of one command.
class Context {
public:
    Context(const ExperimentConfig& cfg) : cfg_(cfg) {}

    const ExperimentConfig& cfg() const { return cfg_; }
    const Subshift& spec() const { return *cfg_.subshift; }
    const Potential& pot() const { return *cfg_.potential; }
    double inf_phi() const { return pot().range().lo; }

    const PartitionTable& table(std::int64_t n) {
        if (!table_ || table_->n_max() < n) table_ = partition_table(spec(), pot(), n, cfg_.budget);
        return *table_;
    }

    const VarProfile& var(std::int64_t n) {
        if (!var_ || static_cast<std::int64_t>(var_->var.size()) <= n) var_ = variation_profile(pot(), spec(), n, cfg_.budget);
        return *var_;
    }

    /// g(0..n) as configured.
    std::vector<double> g(std::int64_t n) {
        if (cfg_.verify.g == "zero") return std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0);
        auto g = var(n / 2 + 1).g;
        g.resize(static_cast<std::size_t>(n) + 1);
        return g;
    }

    std::optional<GapBound> f() const { return cfg_.gap_bound(); }

    GapBound require_f(const std::string& what) const {
        auto f = cfg_.gap_bound();
        if (!f) throw InputError(what + " needs a gap bound: declare subshift.declared_gap or verify.f");
        return *f;
    }

    const PressureBracket& bracket() {
        if (!bracket_) {
            const auto& t = table(cfg_.n_max);
            bracket_ = pressure_bracket(t, f(), g(cfg_.n_max), inf_phi(), cfg_.bracket_tol);
        }
        return *bracket_;
    }

    bool transfer_available() const { return spec().exactness() == Exactness::ExactLanguage && markov_memory(spec()) && pot().radius(); }

    const TransferModel& model() {
        if (!model_) {
            if (!transfer_available())
                throw InputError("transfer model needs a finite-type subshift and a locally constant potential");
            std::size_t n_state = std::max<std::size_t>({1, static_cast<std::size_t>(2 * *pot().radius()), *markov_memory(spec())});
            if (cfg_.state_block) n_state = *cfg_.state_block;
            model_ = build_transfer(spec(), pot(), n_state, cfg_.budget);
        }
        return *model_;
    }

    const PerronResult& perron_data() {
        if (!perron_) perron_ = perron(model(), cfg_.perron_tol);
        return *perron_;
    }

    const MarkovMeasure& markov() {
        if (!markov_) markov_ = markov_equilibrium(model(), perron_data(), cfg_.identity_tol, cfg_.stationarity_tol);
        return *markov_;
    }

    /// Pressure for the verifiers, with where it came from.
    std::pair<double, std::string> pressure() {
        const auto& src = cfg_.verify.P;
        if (src == "transfer" || (src == "auto" && transfer_available()))
            return {std::log(perron_data().lambda), "transfer"};
        if (src == "bracket" || src == "auto") return {bracket().best_hi, "bracket_upper"};
        return {std::stod(src), "configured"};
    }

    ojson transfer_json() {
        const auto& m = model();
        const auto& pr = perron_data();
        const auto comps = strongly_connected_components(m);
        return {{"n_state", m.n_state},
                {"radius", m.radius},
                {"states", m.states()},
                {"edges", m.edges()},
                {"strongly_connected_components", comps.size()},
                {"lambda", pr.lambda},
                {"pressure", std::log(pr.lambda)},
                {"iterations", pr.iterations},
                {"residual", pr.residual},
                {"left_residual", pr.left_residual},
                {"shift", pr.shift}};
    }

private:
    const ExperimentConfig& cfg_;
    std::optional<PartitionTable> table_;
    std::optional<VarProfile> var_;
    std::optional<PressureBracket> bracket_;
    std::optional<TransferModel> model_;
    std::optional<PerronResult> perron_;
    std::optional<MarkovMeasure> markov_;
};

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

struct Outcome {
    ExitCode code = ExitCode::Ok;
    std::string message;
};

Outcome cmd_enumerate(Context& ctx, Payloads& out) {
    const auto& cfg = ctx.cfg();
    Csv counts("n,count");
    for (std::int64_t n = 1; n <= cfg.n_max; ++n) {
        std::uint64_t count = 0;
        std::string words;
        const bool keep = n <= cfg.language_files_max;
        for_each_word(ctx.spec(), static_cast<std::size_t>(n), cfg.budget, [&](SymbolView w) {
            ++count;
            if (keep) words += to_string(w) + "\n";
        });
        if (keep) out[fmt::format("language_{}.txt", n)] = std::move(words);
        counts.row(n, count);
    }
    out["counts.csv"] = counts.text;
    const bool superset = ctx.spec().exactness() != Exactness::ExactLanguage;
    return {ExitCode::Ok, superset ? "words of the locally admissible superset" : ""};
}

Outcome cmd_pressure(Context& ctx, Payloads& out) {
    const auto& cfg = ctx.cfg();
    const auto& table = ctx.table(cfg.n_max);
    Csv part("n,count,lnZ_lo,lnZ_hi");
    for (const auto& r : table.rows) part.row(r.n, r.count, r.lnZ_lo, r.lnZ_hi);
    out["partition.csv"] = part.text;

    Csv vp("n,var,g");
    if (cfg.verify.g == "zero") {
        for (std::int64_t n = 0; n <= cfg.n_max; ++n) vp.row(n, "", 0.0);
    } else {
        const auto& v = ctx.var(cfg.n_max);
        for (std::int64_t n = 0; n <= cfg.n_max; ++n)
            vp.row(n, v.var[static_cast<std::size_t>(n)], v.g[static_cast<std::size_t>(n)]);
    }
    out["varprofile.csv"] = vp.text;

    const auto& b = ctx.bracket();
    Csv pc("n,f,g,lo,hi");
    for (const auto& r : b.rows) pc.row(r.n, r.f, r.g, r.lo, r.hi);
    out["pressure.csv"] = pc.text;

    ojson summary = {{"best_lo", std::isfinite(b.best_lo) ? ojson(b.best_lo) : ojson(nullptr)},
                     {"best_lo_n", b.best_lo_n},
                     {"best_hi", b.best_hi},
                     {"best_hi_n", b.best_hi_n},
                     {"width", std::isfinite(b.width()) ? ojson(b.width()) : ojson(nullptr)},
                     {"consistent", b.consistent},
                     {"upper_bound_only", b.upper_bound_only},
                     {"gap_bound", b.f_description},
                     {"inf_phi", ctx.inf_phi()},
                     {"config_digest", cfg.digest}};
    Outcome res;
    if (ctx.transfer_available()) {
        ojson t = ctx.transfer_json();
        const double P = t["pressure"];
        const bool inside = P <= b.best_hi + cfg.bracket_tol && (b.upper_bound_only || P >= b.best_lo - cfg.bracket_tol);
        t["inside_bracket"] = inside;
        t["config_digest"] = cfg.digest;
        out["transfer.json"] = dump(t);
        summary["transfer_pressure"] = P;
        if (!inside) {
            res = {ExitCode::Inconsistent,
                   fmt::format("transfer pressure {} lies outside the bracket [{}, {}]", format_real(P),
                               format_real(b.best_lo), format_real(b.best_hi))};
        }
    }
    out["bracket.json"] = dump(summary);
    if (!b.consistent) {
        try {
            ensure_consistent(b);
        } catch (const InconsistencyError& e) {
            return {ExitCode::Inconsistent, e.what()};
        }
    }
    return res;
}

Outcome cmd_gap_profile(Context& ctx, Payloads& out) {
    const auto& cfg = ctx.cfg();
    const auto f = ctx.f();
    GapSearchOptions opt = cfg.search;
    if (cfg.glue == GlueStrategy::FactorGlue) {
        const auto* sp = dynamic_cast<const SparseSturmianShift*>(&ctx.spec());
        if (!sp) throw InputError("factor_glue needs a sparse_sturmian subshift");
        opt.factors = &sp->factor_set();
    }
    Csv csv("n,mode,m_max,f_declared,f_empirical,witness_v,witness_u,witness_w,counterexample_v,counterexample_w,"
            "counterexample_m,pairs_total,pairs_checked,sampled,nodes,status");
    Outcome res;
    for (std::int64_t n = cfg.gap_n_lo; n <= cfg.gap_n_hi; ++n) {
        std::optional<std::int64_t> fd;
        if (f) fd = (*f)(n);
        opt.f_declared = fd;
        const std::int64_t m_max = cfg.m_max ? *cfg.m_max : fd.value_or(0) + 2 * n;
        auto row = min_gap_profile(ctx.spec(), n, cfg.gap_mode, m_max, cfg.glue, opt);
        std::string status = row.exhausted() ? "horizon_exhausted" : "ok";
        if (row.counterexample) {
            status = "declared_bound_fails";
            if (res.code == ExitCode::Ok)
                res = {ExitCode::Fail, fmt::format("declared gap bound fails at n={}: v={} w={} m={}", n,
                                                   to_string(row.counterexample->v), to_string(row.counterexample->w),
                                                   row.counterexample->m)};
        }
        auto opt_int = [](const std::optional<std::int64_t>& x) { return x ? std::to_string(*x) : std::string(); };
        csv.row(n, to_string(cfg.gap_mode), m_max, opt_int(fd), opt_int(row.f_empirical), to_string(row.witness_v),
                to_string(row.witness_u), to_string(row.witness_w),
                row.counterexample ? to_string(row.counterexample->v) : std::string(),
                row.counterexample ? to_string(row.counterexample->w) : std::string(),
                row.counterexample ? std::to_string(row.counterexample->m) : std::string(), row.pairs_total,
                row.pairs_checked, row.sampled, row.nodes, status);
    }
    out["gap_profile.csv"] = csv.text;
    return res;
}

BoundReport run_verifier(Context& ctx, Theorem tag, ojson& inputs) {
    const auto& cfg = ctx.cfg();
    const auto& v = cfg.verify;
    const std::int64_t lo = v.n_lo, hi = v.n_hi;
    inputs["n_range"] = {lo, hi};
    auto with_pressure = [&]() {
        auto [P, src] = ctx.pressure();
        inputs["P"] = P;
        inputs["P_source"] = src;
        inputs["inf_phi"] = ctx.inf_phi();
        inputs["g"] = v.g;
        return P;
    };
    switch (tag) {
    case Theorem::Thm4_2: {
        auto f = ctx.require_f("Thm4_2");
        if (f.mode != GapMode::Specification) throw InputError("Thm4_2 needs a specification-mode gap bound");
        const double P = with_pressure();
        inputs["f"] = f.description;
        return verify_partition_bound_spec(ctx.table(hi), P, f, ctx.g(hi), ctx.inf_phi(), lo, hi);
    }
    case Theorem::Cor4_3: {
        auto f = ctx.require_f("Cor4_3");
        if (f.mode != GapMode::Specification) throw InputError("Cor4_3 needs a specification-mode gap bound");
        const double P = with_pressure();
        const auto g = ctx.g(hi);
        auto anchors = anchor_sequence([&](std::int64_t n) { return static_cast<double>(f(n)); },
                                       [&](std::int64_t n) { return g.at(static_cast<std::size_t>(n)); }, hi, v.epsilons);
        if (!anchors.witnessed())
            throw InputError(fmt::format("Cor4_3: no anchor n <= {} for the first epsilon {}", hi, v.epsilons.front()));
        inputs["f"] = f.description;
        inputs["epsilons"] = v.epsilons;
        return verify_speccor(ctx.table(hi), P, anchors, v.epsilon, f, g, ctx.inf_phi());
    }
    case Theorem::Thm4_4: {
        auto f = ctx.require_f("Thm4_4");
        const double P = with_pressure();
        inputs["f"] = f.description;
        inputs["C"] = v.C;
        inputs["M_onset"] = v.M_onset;
        return verify_partition_bound_trans(ctx.table(hi), P, v.C, v.M_onset, f, ctx.g(hi), ctx.inf_phi(), hi);
    }
    case Theorem::Thm4_6: {
        const double P = with_pressure();
        inputs["cylinder"] = to_string(v.cylinder);
        return verify_measbd(ctx.spec(), ctx.pot(), ctx.markov(), ctx.model(), v.cylinder, lo, hi, ctx.g(hi), P,
                             cfg.budget);
    }
    case Theorem::Thm5_2: {
        const auto* bd = dynamic_cast<const BoundedDensityShift*>(&ctx.spec());
        if (!bd) throw InputError("Thm5_2 needs a bounded_density subshift");
        BdSpecOptions o;
        o.declared = cfg.gap_bound();
        o.slack = v.slack;
        o.triples_per_n = v.triples_per_n;
        o.search = cfg.search;
        inputs["f"] = o.declared ? o.declared->description : std::string();
        inputs["slack"] = v.slack;
        return verify_bdspec(*bd, lo, hi, o);
    }
    case Theorem::Thm5_6: {
        const auto* sp = dynamic_cast<const SparseSturmianShift*>(&ctx.spec());
        if (!sp) throw InputError("Thm5_6 needs a sparse_sturmian subshift");
        inputs["strategy"] = to_string(cfg.glue);
        return verify_transex_gap(*sp, lo, hi, cfg.glue, cfg.search);
    }
    }
    throw InputError("unknown theorem");
}

Outcome cmd_verify(Context& ctx, const std::string& tag, Payloads& out) {
    if (tag.empty()) throw InputError("verify needs a theorem tag");
    const Theorem t = parse_theorem(tag);
    ojson inputs = ojson::object();
    BoundReport rep = run_verifier(ctx, t, inputs);
    rep.tolerance = t == Theorem::Thm5_2 || t == Theorem::Thm5_6 ? 0.0 : ctx.cfg().margin_tol;
    if (rep.verdict != BoundVerdict::PreconditionFail) {
        rep.verdict = BoundVerdict::Pass;
        for (const auto& m : rep.margins)
            if (!(m.value >= -rep.tolerance)) rep.verdict = BoundVerdict::Fail;
    }
    ojson j = report_json(rep, ctx.cfg().digest);
    j["inputs"] = inputs;
    out["report_" + tag + ".json"] = dump(j);
    std::string msg = rep.message.empty() ? to_string(rep.verdict) : to_string(rep.verdict) + ": " + rep.message;
    return {exit_code_for(rep.verdict), msg};
}

Outcome cmd_equilibrium(Context& ctx, Payloads& out) {
    ojson t = ctx.transfer_json();
    t["config_digest"] = ctx.cfg().digest;
    out["transfer.json"] = dump(t);
    const auto& m = ctx.model();
    const auto& mm = ctx.markov();
    ojson pi = ojson::array();
    for (std::size_t i = 0; i < m.states(); ++i) pi.push_back({to_string(m.state_word(i)), mm.pi[i]});
    ojson eq = {{"lambda", mm.lambda},
                {"pressure", std::log(mm.lambda)},
                {"entropy", mm.entropy},
                {"phi_integral", mm.phi_integral},
                {"identity_error", mm.identity_error},
                {"stationarity_error", mm.stationarity_error},
                {"n_state", m.n_state},
                {"pi", pi},
                {"config_digest", ctx.cfg().digest}};
    if (!ctx.cfg().verify.cylinder.empty())
        eq["cylinder"] = {{"word", to_string(ctx.cfg().verify.cylinder)},
                          {"measure", cylinder_measure(mm, m, ctx.cfg().verify.cylinder)}};
    out["equilibrium.json"] = dump(eq);
    return {};
}

Outcome cmd_anchors(Context& ctx, Payloads& out) {
    const auto& cfg = ctx.cfg();
    auto f = ctx.require_f("anchors");
    const std::int64_t H = cfg.anchor_horizon;
    const auto g = ctx.g(H);
    auto anchors = anchor_sequence([&](std::int64_t n) { return static_cast<double>(f(n)); },
                                   [&](std::int64_t n) { return g[static_cast<std::size_t>(n)]; }, H, cfg.verify.epsilons);
    Csv csv("k,epsilon,n,score");
    for (std::size_t k = 0; k < anchors.anchors.size(); ++k) {
        const auto& a = anchors.anchors[k];
        csv.row(k + 1, a.epsilon, a.n, a.score);
    }
    out["anchors.csv"] = csv.text;
    std::vector<double> fg(static_cast<std::size_t>(H) + 1, 0.0);
    for (std::int64_t n = 1; n <= H; ++n) fg[static_cast<std::size_t>(n)] = static_cast<double>(f(n)) + g[static_cast<std::size_t>(n)];
    auto growth = [](const GrowthReport& r) {
        ojson ratio = ojson::array();
        for (const auto& [n, x] : r.ratio) ratio.push_back({n, x});
        return ojson{{"class", r.label()}, {"slope", r.slope}, {"over_ln_n", ratio}};
    };
    out["growth.json"] = dump({{"horizon", H},
                               {"g", growth(growth_class(g, H))},
                               {"f_plus_g", growth(growth_class(fg, H))},
                               {"anchors_found", anchors.anchors.size()},
                               {"epsilons_requested", cfg.verify.epsilons.size()},
                               {"config_digest", cfg.digest}});
    if (!anchors.witnessed()) return {ExitCode::Ok, "no anchor satisfies the first epsilon on this horizon"};
    return {};
}

std::string status_name(ExitCode c) {
    switch (c) {
    case ExitCode::Ok: return "ok";
    case ExitCode::Internal: return "internal_error";
    case ExitCode::Input: return "input_error";
    case ExitCode::Budget: return "budget_exhausted";
    case ExitCode::Inconsistent: return "inconsistent";
    case ExitCode::Fail: return "fail";
    case ExitCode::PreconditionFail: return "precondition_fail";
    }
    return "?";
}

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

CommandResult run_command(const ExperimentConfig& cfg, const std::string& command, const std::string& tag,
                          const RunOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    CommandResult res;
    res.out_dir = options.out_dir.empty() ? cfg.output_dir : options.out_dir;
    Payloads out;
    Outcome oc;
    Context ctx(cfg);
    try {
        if (command == "enumerate") oc = cmd_enumerate(ctx, out);
        else if (command == "pressure") oc = cmd_pressure(ctx, out);
        else if (command == "gap-profile") oc = cmd_gap_profile(ctx, out);
        else if (command == "verify") oc = cmd_verify(ctx, tag, out);
        else if (command == "equilibrium") oc = cmd_equilibrium(ctx, out);
        else if (command == "anchors") oc = cmd_anchors(ctx, out);
        else throw InputError("unknown command '" + command + "'");
    } catch (const InputError& e) {
        res.code = ExitCode::Input;
        res.status = status_name(res.code);
        res.message = e.what();
        return res;  // nothing written
    } catch (const BudgetExhausted& e) {
        oc = {ExitCode::Budget, e.what()};
    } catch (const InconsistencyError& e) {
        oc = {ExitCode::Inconsistent, e.what()};
    } catch (const std::exception& e) {
        oc = {ExitCode::Internal, e.what()};
    }
    res.code = oc.code;
    res.status = status_name(oc.code);
    res.message = oc.message;

    std::error_code ec;
    fs::create_directories(res.out_dir, ec);
    if (ec) {
        res.code = ExitCode::Input;
        res.status = status_name(res.code);
        res.message = "cannot create output directory " + res.out_dir + ": " + ec.message();
        return res;
    }
    out["config.json"] = dump({{"config_digest", cfg.digest}, {"config", cfg.doc}});
    ojson inventory = ojson::array();
    for (const auto& [name, content] : out) {
        const auto path = fs::path(res.out_dir) / name;
        std::ofstream f(path, std::ios::binary);
        f << content;
        if (!f) throw std::runtime_error("cannot write " + path.string());
        res.files.push_back(path.string());
        inventory.push_back({{"file", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ojson manifest = {{"artifact_version", kArtifactVersion},
                      {"command", command},
                      {"tag", tag},
                      {"config_digest", cfg.digest},
                      {"status", res.status},
                      {"exit_code", static_cast<int>(res.code)},
                      {"message", res.message},
                      {"budget", cfg.budget},
                      {"threads", options.threads},
                      {"started_at", utc_now()},
                      {"wall_clock_seconds", secs},
                      {"outputs", inventory}};
    const std::string mname = tag.empty() ? "manifest_" + command + ".json" : "manifest_" + command + "_" + tag + ".json";
    const auto mpath = fs::path(res.out_dir) / mname;
    std::ofstream(mpath, std::ios::binary) << dump(manifest);
    res.files.push_back(mpath.string());
    return res;
}

} // namespace symdyn
