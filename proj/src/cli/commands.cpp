#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "mgk/analytic.hpp"
#include "mgk/calibrate.hpp"
#include "mgk/cli.hpp"
#include "mgk/detect.hpp"
#include "mgk/error.hpp"
#include "mgk/parallel.hpp"
#include "mgk/sim.hpp"
#include "output.hpp"

using nlohmann::json;

namespace mgk::cli {
namespace {

const char* name_of(analytic::PbStrategy s) {
    return s == analytic::PbStrategy::ErlangC ? "erlang_c" : "simulated";
}
const char* name_of(analytic::VarianceVariant v) {
    return v == analytic::VarianceVariant::HeavyTail ? "heavy_tail" : "exact";
}
const char* name_of(analytic::WaitTerm w) {
    return w == analytic::WaitTerm::PkConsistent ? "pk_consistent" : "rho_ratio";
}

Cell opt_cell(const std::optional<double>& v) {
    if (v) return *v;
    return std::monostate{};
}
Cell int_cell(long long v) { return static_cast<std::int64_t>(v); }

struct Context {
    std::string command;
    RunConfig cfg;
    std::ostream& out;
    std::ostream& err;
    std::vector<std::string> notes;

    void warn(const std::string& msg) {
        err << "warning: " << msg << "\n";
        notes.push_back("warning: " + msg);
    }

    json metadata() const {
        json echo = cfg.effective;
        echo.erase("metadata");
        // Where the file is written does not change its content.
        if (echo.contains("output")) echo["output"].erase("path");
        return json{
            {"tool", kToolName},
            {"version", kToolVersion},
            {"command", command},
            {"config", echo},
            {"seeds", {{"simulation", cfg.simulation.seed}}},
            {"pb_strategy", name_of(cfg.analytic.pb_strategy)},
            {"variance_variant", name_of(cfg.analytic.variance_variant)},
            {"wait_term", name_of(cfg.analytic.wait_term)},
            {"warmup_fraction", cfg.simulation.warmup_fraction},
            {"ci_level", cfg.simulation.ci_level},
            {"notes", notes},
        };
    }

    void finish(Report report) {
        report.metadata = metadata();
        std::ostringstream text;
        if (cfg.output.format == "json") {
            write_json(text, report);
        } else {
            write_csv(text, report);
        }
        emit(text.str(), cfg.output.path.value_or(""), out);
    }

    analytic::Options analytic_options() const {
        analytic::Options o;
        o.pb.strategy = cfg.analytic.pb_strategy;
        o.pb.seed = cfg.simulation.seed;
        o.pb.sim_jobs = cfg.analytic.pb_sim_jobs;
        o.pb.warmup_fraction = cfg.simulation.warmup_fraction;
        o.variance = cfg.analytic.variance_variant;
        o.wait = cfg.analytic.wait_term;
        return o;
    }

    sim::RoundOptions round_options(bool label) const {
        sim::RoundOptions r;
        r.rounds = cfg.simulation.rounds;
        r.n_per_round = cfg.simulation.n;
        r.seed = cfg.simulation.seed;
        r.warmup_fraction = cfg.simulation.warmup_fraction;
        r.ci_level = cfg.simulation.ci_level;
        r.label = label;
        return r;
    }

    std::vector<int> k_range() const {
        auto ks = cfg.servers.range();
        if (ks.empty()) throw ValidationError("servers.k_max", "empty server range (k_max < k_min)");
        return ks;
    }
};

json metrics_json(const QueueMetrics& m) {
    return json{{"k", m.k},           {"mean_t", m.mean_t},       {"sd_t", m.sd_t},
                {"var_t", m.var_t},   {"p_block", m.p_block},     {"cond_wait", m.cond_wait}};
}

json optimal_json(const OptimalServers& o) {
    json per_k = json::array();
    for (const auto& m : o.per_k) per_k.push_back(metrics_json(m));
    return json{{"k_mu", o.k_mu},
                {"k_sigma", o.k_sigma},
                {"mu_star", o.mu_star},
                {"sigma_star", o.sigma_star},
                {"per_k", per_k}};
}

json summary_json(int k, const sim::SimSummary& s) {
    return json{{"k", k},
                {"n", s.n},
                {"rounds", s.rounds},
                {"mean_t", s.mean_t},
                {"mean_t_ci_halfwidth", s.ci_halfwidth},
                {"sd_t", s.sd_t},
                {"sd_t_ci_halfwidth", s.sd_ci_halfwidth},
                {"mean_w", s.mean_w},
                {"sd_w", s.sd_w},
                {"p_wait", s.p_wait},
                {"cond_wait", s.cond_wait},
                {"impaired_fraction", s.impaired_fraction ? json(*s.impaired_fraction) : json(nullptr)},
                {"round_mean_t", s.round_mean_t},
                {"round_sd_t", s.round_sd_t},
                {"ci_level", s.ci_level},
                {"warmup_fraction", s.warmup_fraction},
                {"seed", s.seed}};
}

void check_saturation(Context& ctx, const WorkloadSpec& spec) {
    if (spec.rho() >= 0.99)
        ctx.warn("utilization " + format_number(spec.rho()) +
                 " is at or above 0.99; results are close to saturation");
}

void cmd_analyze(Context& ctx) {
    auto spec = ctx.cfg.workload.build();
    check_saturation(ctx, spec);
    auto ks = ctx.k_range();
    auto opts = ctx.analytic_options();
    std::vector<QueueMetrics> rows(ks.size());
    parallel_for(ks.size(), [&](std::size_t i) { rows[i] = analytic::queue_metrics(spec, ks[i], opts); });

    Report r;
    r.table.columns = {"k", "mean_t", "sd_t", "p_block", "cond_wait"};
    for (const auto& m : rows)
        r.table.rows.push_back({int_cell(m.k), m.mean_t, m.sd_t, m.p_block, m.cond_wait});
    ctx.finish(std::move(r));
}

void cmd_optimize(Context& ctx) {
    auto spec = ctx.cfg.workload.build();
    check_saturation(ctx, spec);
    auto ks = ctx.k_range();
    auto opts = ctx.analytic_options();
    std::vector<QueueMetrics> per_k(ks.size());
    parallel_for(ks.size(), [&](std::size_t i) { per_k[i] = analytic::queue_metrics(spec, ks[i], opts); });
    auto best = select_optimal(per_k);

    Report r;
    r.table_name = "optimal";
    r.table.columns = {"source", "k_mu", "k_sigma", "mu_star", "sigma_star", "mu_ci_halfwidth",
                       "sigma_ci_halfwidth"};
    r.table.rows.push_back({std::string("analytic"), int_cell(best.k_mu), int_cell(best.k_sigma),
                            best.mu_star, best.sigma_star, std::monostate{}, std::monostate{}});
    r.extra["analytic"] = optimal_json(best);

    if (ctx.cfg.analytic.pb_strategy == analytic::PbStrategy::Simulated) {
        auto summaries = sim::run_rounds_over(spec, ks, ctx.round_options(false));
        auto sim_best = sim::select_simulated(ks, summaries);
        auto idx = [&](int k) { return static_cast<std::size_t>(k - ks.front()); };
        const auto& smu = summaries[idx(sim_best.k_mu)];
        const auto& ssd = summaries[idx(sim_best.k_sigma)];
        r.table.rows.push_back({std::string("simulated"), int_cell(sim_best.k_mu),
                                int_cell(sim_best.k_sigma), sim_best.mu_star, sim_best.sigma_star,
                                smu.ci_halfwidth, ssd.sd_ci_halfwidth});
        json detail = json::array();
        for (std::size_t i = 0; i < ks.size(); ++i) detail.push_back(summary_json(ks[i], summaries[i]));
        r.extra["simulated"] = json{{"k_mu", sim_best.k_mu},
                                    {"k_sigma", sim_best.k_sigma},
                                    {"mu_star", sim_best.mu_star},
                                    {"sigma_star", sim_best.sigma_star},
                                    {"per_k", detail}};
    }
    ctx.finish(std::move(r));
}

void cmd_simulate(Context& ctx) {
    auto spec = ctx.cfg.workload.build();
    check_saturation(ctx, spec);
    auto ks = ctx.k_range();
    auto ropts = ctx.round_options(true);
    auto summaries = sim::run_rounds_over(spec, ks, ropts);
    auto mg1 = analytic::mg1_exact(spec);

    if (ctx.cfg.simulation.trace_path) {
        auto jobs = sim::simulate(spec, ks.front(), ctx.cfg.simulation.n, ctx.cfg.simulation.seed,
                                  ctx.cfg.simulation.warmup_fraction, 0);
        sim::label_impaired(jobs);
        std::ostringstream text;
        sim::write_trace_csv(text, jobs);
        emit(text.str(), *ctx.cfg.simulation.trace_path, ctx.out);
        ctx.notes.push_back("trace: round 0 at k=" + std::to_string(ks.front()) + " written to " +
                            *ctx.cfg.simulation.trace_path);
    }

    Report r;
    r.table.columns = {"k",         "n",         "mean_t",     "mean_t_ci", "sd_t",
                       "sd_t_ci",   "mean_w",    "p_wait",     "cond_wait", "impaired_fraction",
                       "mg1_mean_t", "mg1_sd_t", "mg1_mean_rel_err", "mg1_sd_rel_err"};
    json detail = json::array();
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const auto& s = summaries[i];
        std::vector<Cell> row{int_cell(ks[i]), int_cell(static_cast<long long>(s.n)), s.mean_t,
                              s.ci_halfwidth, s.sd_t, s.sd_ci_halfwidth, s.mean_w, s.p_wait,
                              s.cond_wait, opt_cell(s.impaired_fraction)};
        if (ks[i] == 1) {
            row.insert(row.end(), {mg1.mean_t, mg1.sd_t, std::fabs(s.mean_t - mg1.mean_t) / mg1.mean_t,
                                   std::fabs(s.sd_t - mg1.sd_t) / mg1.sd_t});
        } else {
            row.insert(row.end(), 4, std::monostate{});
        }
        r.table.rows.push_back(std::move(row));
        detail.push_back(summary_json(ks[i], s));
    }
    r.extra["summaries"] = detail;
    r.extra["mg1"] = json{{"mean_t", mg1.mean_t}, {"sd_t", mg1.sd_t}, {"mean_w", mg1.mean_w},
                          {"var_w", mg1.var_w}};
    ctx.finish(std::move(r));
}

void cmd_detect(Context& ctx) {
    auto spec = ctx.cfg.workload.build();
    check_saturation(ctx, spec);
    auto ks = ctx.k_range();
    const auto& d = ctx.cfg.detection;
    detect::SweepOptions o;
    o.n_samples = d.n_samples;
    o.test_fraction = d.test_fraction;
    o.trainer = d.trainer;
    o.feature = d.feature;
    o.seed = ctx.cfg.simulation.seed;
    o.warmup_fraction = ctx.cfg.simulation.warmup_fraction;
    o.threshold = d.binary;
    o.threshold_trainer = d.threshold_trainer;
    o.threshold_feature = d.feature;
    auto points = detect::accuracy_vs_k(spec, ks.front(), ks.back(), o);

    Report r;
    r.table.columns = {"k", "accuracy", "impaired_fraction", "threshold", "p_value", "n_train", "n_test", "seed"};
    json detail = json::array();
    for (const auto& p : points) {
        json confusion = json::array();
        for (const auto& row : p.report.confusion) confusion.push_back(row);
        json item{{"k", p.k},
                  {"accuracy_3class", p.report.accuracy},
                  {"confusion", confusion},
                  {"impaired_fraction", p.impaired_fraction ? json(*p.impaired_fraction) : json(nullptr)},
                  {"short_clean_prior", p.short_clean_prior ? json(*p.short_clean_prior) : json(nullptr)},
                  {"p_value", p.p_value ? json(*p.p_value) : json(nullptr)}};
        if (d.binary && p.threshold) {
            const auto& t = *p.threshold;
            auto n = int_cell(static_cast<long long>(t.n));
            r.table.rows.push_back({int_cell(p.k), t.accuracy, opt_cell(p.impaired_fraction), opt_cell(t.threshold),
                                    t.ttest ? Cell(t.ttest->p_value) : Cell(std::monostate{}), n, n,
                                    int_cell(static_cast<long long>(o.seed))});
            item["threshold"] = json{
                {"value", t.threshold ? json(*t.threshold) : json(nullptr)},
                {"boundaries", t.model.boundaries},
                {"accuracy", t.accuracy},
                {"n", t.n},
                {"short_clean_prior", t.short_clean_prior ? json(*t.short_clean_prior) : json(nullptr)},
                {"mean_wait_clean", t.mean_wait_clean ? json(*t.mean_wait_clean) : json(nullptr)},
                {"mean_wait_impaired", t.mean_wait_impaired ? json(*t.mean_wait_impaired) : json(nullptr)},
                {"t_stat", t.ttest ? json(t.ttest->t_stat) : json(nullptr)},
                {"dof", t.ttest ? json(t.ttest->dof) : json(nullptr)}};
        } else {
            r.table.rows.push_back({int_cell(p.k), p.report.accuracy, opt_cell(p.impaired_fraction), std::monostate{},
                                    opt_cell(p.p_value), int_cell(static_cast<long long>(p.report.n_train)),
                                    int_cell(static_cast<long long>(p.report.n_test)),
                                    int_cell(static_cast<long long>(p.report.seed))});
        }
        detail.push_back(std::move(item));
    }
    r.extra["points"] = detail;
    ctx.notes.push_back(d.binary ? "binary mode: short jobs only, clean vs impaired, trained and "
                                   "scored on the full trace"
                                 : "three-class mode: short clean, short impaired, long");
    ctx.finish(std::move(r));
}

void cmd_calibrate(Context& ctx, const std::string& baseline_path, const std::string& attack_path,
                   std::optional<double> rho_estimate) {
    auto baseline = calibrate::load_samples(baseline_path, calibrate::RunLabel::Baseline);
    auto attack = calibrate::load_samples(attack_path, calibrate::RunLabel::UnderAttack);
    auto p = calibrate::estimate_params(baseline, attack, rho_estimate);
    for (const auto& w : p.warnings) ctx.warn(w);

    json workload = ctx.cfg.effective.at("workload");
    workload["ex_short"] = p.ex_short;
    workload["ex_long"] = p.ex_long;
    workload["ratio"] = nullptr;

    json doc = json::object();
    doc["metadata"] = ctx.metadata();
    doc["calibration"] = json{{"baseline_path", baseline_path},
                              {"attack_path", attack_path},
                              {"n_short", p.n_short},
                              {"n_long", p.n_long},
                              {"sd_short", p.sd_short},
                              {"sd_long", p.sd_long},
                              {"ratio", p.ratio()},
                              {"baseline_rho_estimate", rho_estimate ? json(*rho_estimate) : json(nullptr)},
                              {"warnings", p.warnings}};
    doc["workload"] = workload;
    emit(doc.dump(2) + "\n", ctx.cfg.output.path.value_or(""), ctx.out);
}

std::vector<analytic::GridPoint> sweep_grid(const SweepConfig& s) {
    std::vector<analytic::GridPoint> grid;
    for (double ratio : s.ratios)
        for (double alpha : s.alphas)
            for (double rho : s.rhos) grid.push_back({ratio, alpha, rho});
    analytic::sort_table_order(grid);
    if (s.rows.empty()) return grid;
    std::vector<analytic::GridPoint> picked;
    for (int row : s.rows) {
        if (row > static_cast<int>(grid.size()))
            throw ValidationError("sweep.rows", "row " + std::to_string(row) + " exceeds the grid size " +
                                                    std::to_string(grid.size()));
        picked.push_back(grid[static_cast<std::size_t>(row - 1)]);
    }
    return picked;
}

void cmd_sweep(Context& ctx) {
    const auto& s = ctx.cfg.sweep;
    auto full = sweep_grid(SweepConfig{s.ratios, s.alphas, s.rhos, s.k_max, s.simulate, s.sim_k_max, {}});
    auto grid = sweep_grid(s);

    analytic::SweepOptions o;
    o.k_max = s.k_max;
    o.analytic = ctx.analytic_options();
    o.ex_short = ctx.cfg.workload.ex_short;
    o.sim_k_max = s.sim_k_max;
    if (s.simulate) o.simulate = ctx.round_options(false);
    auto rows = analytic::sweep(grid, o);

    auto row_number = [&](const analytic::GridPoint& g) -> std::int64_t {
        for (std::size_t i = 0; i < full.size(); ++i)
            if (full[i].ratio == g.ratio && full[i].alpha == g.alpha && full[i].rho == g.rho)
                return static_cast<std::int64_t>(i + 1);
        return 0;
    };

    Report r;
    r.table.columns = {"row",         "ratio",        "alpha",        "rho",          "k_mu",
                       "k_sigma",     "mu_star",      "sigma_star",   "sim_k_mu",     "sim_k_sigma",
                       "sim_mu_star", "sim_mu_ci",    "sim_sigma_star", "sim_sigma_ci", "sigma_le_mu",
                       "mg1_mean_t",  "mg1_sd_t",     "error"};
    std::size_t flagged = 0;
    for (const auto& row : rows) {
        std::vector<Cell> cells{row_number(row.point), row.point.ratio, row.point.alpha, row.point.rho};
        if (row.analytic) {
            const auto& a = *row.analytic;
            cells.insert(cells.end(), {int_cell(a.k_mu), int_cell(a.k_sigma), a.mu_star, a.sigma_star});
        } else {
            cells.insert(cells.end(), 4, std::monostate{});
        }
        const OptimalServers* ordering_src = row.analytic ? &*row.analytic : nullptr;
        if (row.simulated) {
            const auto& m = *row.simulated;
            const auto& smu = row.simulated_detail[static_cast<std::size_t>(m.k_mu - 1)];
            const auto& ssd = row.simulated_detail[static_cast<std::size_t>(m.k_sigma - 1)];
            cells.insert(cells.end(), {int_cell(m.k_mu), int_cell(m.k_sigma), m.mu_star, smu.ci_halfwidth,
                                       m.sigma_star, ssd.sd_ci_halfwidth});
            ordering_src = &m;
        } else {
            cells.insert(cells.end(), 6, std::monostate{});
        }
        if (ordering_src) {
            bool ok = ordering_src->k_sigma <= ordering_src->k_mu;
            if (!ok) ++flagged;
            cells.push_back(int_cell(ok ? 1 : 0));
        } else {
            cells.push_back(std::monostate{});
        }
        if (row.mg1) {
            cells.insert(cells.end(), {row.mg1->mean_t, row.mg1->sd_t});
        } else {
            cells.insert(cells.end(), 2, std::monostate{});
        }
        cells.push_back(row.error ? Cell(*row.error) : Cell(std::monostate{}));
        r.table.rows.push_back(std::move(cells));
    }

    auto ref = workload_from_ratio(0.6, 0.05, 0.5, ctx.cfg.workload.ex_short);
    auto ref_mg1 = analytic::mg1_exact(ref);
    ctx.notes.push_back(
        "M/G/1 sd discrepancy: reference tables list 1288.88 as the M/G/1 standard deviation for "
        "ratio 0.05, alpha 0.6, rho 0.5. The exact Pollaczek-Khinchine value is " +
        format_number(ref_mg1.sd_t) +
        " and agrees with simulation (about 934); the printed value is not used as a target.");
    ctx.notes.push_back("sigma_le_mu uses simulated argmins when present, analytic otherwise; " +
                        std::to_string(flagged) + " row(s) have k_sigma > k_mu");
    ctx.finish(std::move(r));
}

// Pulls `--section.key value` and `--section.key=value` out of argv. Any
// flag whose name contains a dot is a config override.
std::vector<std::pair<std::string, std::string>> extract_overrides(std::vector<std::string>& args) {
    std::vector<std::pair<std::string, std::string>> out;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) == 0) {
            std::string body = a.substr(2);
            auto eq = body.find('=');
            std::string key = body.substr(0, eq);
            if (key.find('.') != std::string::npos) {
                if (eq != std::string::npos) {
                    out.emplace_back(key, body.substr(eq + 1));
                } else {
                    if (i + 1 >= args.size()) throw ValidationError(key, "missing value");
                    out.emplace_back(key, args[++i]);
                }
                continue;
            }
        }
        rest.push_back(a);
    }
    args = std::move(rest);
    return out;
}

json load_config_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read config file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    json doc = json::parse(text, nullptr, false, /*ignore_comments=*/true);
    if (doc.is_discarded()) throw ValidationError(path, "not valid JSON");
    if (!doc.is_object()) throw ValidationError(path, "top level must be an object");
    return doc;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args = raw_args;
    std::string command;
    try {
        auto overrides = extract_overrides(args);

        CLI::App app{"Server-count planning for M/G/k queues under low-rate attacks", kToolName};
        app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
        app.require_subcommand(1);

        std::string config_path, out_path, format, pb, feature, rows;
        std::optional<std::uint64_t> seed;
        bool binary = false;
        std::string baseline, attack;
        std::optional<double> rho_estimate;

        auto common = [&](CLI::App* sub) {
            sub->add_option("--config,-c", config_path, "JSON config file");
            sub->add_option("--out,-o", out_path, "output file (default stdout)");
            sub->add_option("--format", format, "csv or json");
            sub->add_option("--seed", seed, "simulation seed");
            sub->add_option("--pb", pb, "erlang_c or simulated");
        };
        auto* analyze = app.add_subcommand("analyze", "analytic metrics per k");
        auto* optimize = app.add_subcommand("optimize", "server counts minimizing mean and sd");
        auto* simulate = app.add_subcommand("simulate", "discrete-event simulation per k");
        auto* detectc = app.add_subcommand("detect", "attack-detection accuracy per k");
        auto* calib = app.add_subcommand("calibrate", "estimate service times from measurements");
        auto* sweepc = app.add_subcommand("sweep", "optimal servers over a parameter grid");
        for (auto* s : {analyze, optimize, simulate, detectc, calib, sweepc}) common(s);
        for (auto* s : {detectc}) {
            s->add_option("--feature", feature, "response or waiting");
            s->add_flag("--binary", binary, "clean vs impaired short jobs with Welch p-values");
        }
        sweepc->add_option("--rows", rows, "comma-separated 1-based row numbers");
        calib->add_option("--baseline", baseline, "baseline response times (ms), one per line")->required();
        calib->add_option("--attack", attack, "under-attack response times (ms), one per line")->required();
        calib->add_option("--rho-estimate", rho_estimate, "measured utilization during the baseline run");

        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::Success& e) {
            std::ostringstream o, e2;
            int code = app.exit(e, o, e2);
            out << o.str();
            err << e2.str();
            return code;
        } catch (const CLI::ParseError& e) {
            std::ostringstream o, e2;
            app.exit(e, o, e2);
            err << e2.str() << o.str();
            return kUsage;
        }
        command = app.get_subcommands().front()->get_name();

        json user = config_path.empty() ? json::object() : load_config_file(config_path);
        for (const auto& [key, value] : overrides) apply_override(user, key, value);
        if (!out_path.empty()) user["output"]["path"] = out_path;
        if (!format.empty()) user["output"]["format"] = format;
        if (!pb.empty()) user["analytic"]["pb_strategy"] = pb;
        if (seed) user["simulation"]["seed"] = *seed;
        if (!feature.empty()) user["detection"]["feature"] = feature;
        if (binary) user["detection"]["binary"] = true;
        if (!rows.empty()) apply_override(user, "sweep.rows", rows.find(',') == std::string::npos ? "[" + rows + "]" : rows);

        Context ctx{command, parse_config(user), out, err, {}};
        if (command == "analyze") cmd_analyze(ctx);
        else if (command == "optimize") cmd_optimize(ctx);
        else if (command == "simulate") cmd_simulate(ctx);
        else if (command == "detect") cmd_detect(ctx);
        else if (command == "calibrate") cmd_calibrate(ctx, baseline, attack, rho_estimate);
        else if (command == "sweep") cmd_sweep(ctx);
        return kOk;
    } catch (const ValidationError& e) {
        err << kToolName << (command.empty() ? "" : " " + command) << ": error: " << e.what() << "\n";
        return kUsage;
    } catch (const SaturationError& e) {
        err << kToolName << ": saturation: " << e.what() << "\n";
        return kRuntime;
    } catch (const IoError& e) {
        err << kToolName << ": io error: " << e.what() << "\n";
        return kRuntime;
    } catch (const std::exception& e) {
        err << kToolName << ": error: " << e.what() << "\n";
        return kRuntime;
    }
}

}  // namespace mgk::cli
