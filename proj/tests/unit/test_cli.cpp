#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mgk/analytic.hpp"
#include "mgk/cli.hpp"
#include "mgk/error.hpp"

using nlohmann::json;
using namespace mgk;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> cells(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

json metadata_of(const std::string& csv) {
    auto first = lines(csv).at(0);
    REQUIRE(first.rfind("# metadata: ", 0) == 0);
    return json::parse(first.substr(12));
}

fs::path tmp(const std::string& name) {
    auto dir = fs::temp_directory_path() / "mgk_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string field_of(const json& user) {
    try {
        cli::parse_config(user);
    } catch (const ValidationError& e) {
        return e.field();
    }
    return "<none>";
}

}  // namespace

TEST_CASE("config defaults and validation") {
    auto cfg = cli::parse_config(json::object());
    CHECK(cfg.workload.alpha == 0.99);
    CHECK(cfg.simulation.rounds == 5);
    CHECK(cfg.simulation.n == 1'000'000);
    CHECK(cfg.simulation.warmup_fraction == 0.01);
    CHECK(cfg.detection.n_samples == 50'000);
    CHECK(cfg.workload.build().ex_long() == doctest::Approx(95.20));
    CHECK(cfg.effective == cli::default_config_json());

    CHECK(field_of({{"workload", {{"beta", 1}}}}) == "workload.beta");
    CHECK(field_of({{"nonsense", 1}}) == "nonsense");
    CHECK(field_of({{"servers", {{"k_max", "x"}}}}) == "servers.k_max");
    CHECK(field_of({{"servers", {{"k_min", 0}}}}) == "servers.k_min");
    CHECK(field_of({{"analytic", {{"pb_strategy", "magic"}}}}) == "analytic.pb_strategy");
    CHECK(field_of({{"detection", {{"test_fraction", 1.0}}}}) == "detection.test_fraction");
    CHECK(field_of({{"sweep", {{"ratios", {0.1, "a"}}}}}) == "sweep.ratios[1]");
    CHECK(field_of({{"sweep", {{"rows", {0}}}}}) == "sweep.rows[0]");
    CHECK(field_of({{"workload", 3}}) == "workload");
    CHECK(field_of({{"metadata", {{"anything", 1}}}, {"calibration", {{"ratio", 0.5}}}}) == "<none>");

    auto both = cli::parse_config({{"workload", {{"ex_long", 100.0}, {"ratio", 0.5}}}});
    CHECK_THROWS_AS(both.workload.build(), ValidationError);
    auto bad_alpha = cli::parse_config({{"workload", {{"alpha", 1.5}}}});
    try {
        bad_alpha.workload.build();
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.field() == "workload.alpha");
    }

    auto by_rate = cli::parse_config({{"workload", {{"lambda", 0.001}}}});
    CHECK_FALSE(by_rate.workload.rho.has_value());
    CHECK(by_rate.workload.build().lambda_total() == doctest::Approx(0.001));
}

TEST_CASE("dotted overrides") {
    json doc = json::object();
    cli::apply_override(doc, "workload.alpha", "0.8");
    cli::apply_override(doc, "analytic.pb_strategy", "simulated");
    cli::apply_override(doc, "sweep.rhos", "0.5,0.8");
    cli::apply_override(doc, "workload.ex_long", "null");
    cli::apply_override(doc, "output.path", "\"x.csv\"");
    CHECK(doc["workload"]["alpha"] == 0.8);
    CHECK(doc["analytic"]["pb_strategy"] == "simulated");
    CHECK(doc["sweep"]["rhos"] == json({0.5, 0.8}));
    CHECK(doc["workload"]["ex_long"].is_null());
    CHECK(doc["output"]["path"] == "x.csv");
    CHECK_THROWS_AS(cli::apply_override(doc, "workload..alpha", "1"), ValidationError);
    CHECK_THROWS_AS(cli::apply_override(doc, "workload.alpha.x", "1"), ValidationError);
}

TEST_CASE("analyze") {
    auto r = run_cli({"analyze", "--workload.ratio", "0.5686"});
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 22);
    CHECK(ls[1] == "k,mean_t,sd_t,p_block,cond_wait");
    double best = 1e300;
    int best_k = 0;
    for (std::size_t i = 2; i < ls.size(); ++i) {
        auto c = cells(ls[i]);
        double m = std::stod(c[1]);
        if (m < best) {
            best = m;
            best_k = std::stoi(c[0]);
        }
    }
    CHECK(best_k == 1);

    auto single = run_cli({"analyze", "--servers.k_min=4", "--servers.k_max=4"});
    REQUIRE(single.code == 0);
    CHECK(lines(single.out).size() == 3);

    auto hot = run_cli({"analyze", "--workload.rho", "0.999", "--servers.k_max", "3"});
    CHECK(hot.code == 0);
    CHECK(lines(hot.out).size() == 5);
    CHECK(hot.err.find("warning") != std::string::npos);
    CHECK(metadata_of(hot.out)["notes"].size() == 1);

    auto md = metadata_of(r.out);
    CHECK(md["tool"] == "mgk-plan");
    CHECK(md["version"] == cli::kToolVersion);
    CHECK(md["command"] == "analyze");
    CHECK(md["pb_strategy"] == "erlang_c");
    CHECK(md["variance_variant"] == "heavy_tail");
    CHECK(md["wait_term"] == "pk_consistent");
    CHECK(md["warmup_fraction"] == 0.01);
    CHECK(md["ci_level"] == 0.95);
    CHECK(md["seeds"]["simulation"] == 1);
    CHECK(md["config"]["workload"]["ratio"] == 0.5686);
}

TEST_CASE("analyze JSON carries full precision") {
    auto r = run_cli({"analyze", "--format", "json", "--workload.ratio", "0.05", "--workload.alpha", "0.6",
                      "--servers.k_max", "2"});
    REQUIRE(r.code == 0);
    auto doc = json::parse(r.out);
    auto expect = analytic::queue_metrics(workload_from_ratio(0.6, 0.05, 0.5), 2);
    CHECK(doc["rows"][1]["mean_t"].get<double>() == expect.mean_t);
    CHECK(doc["rows"][1]["sd_t"].get<double>() == expect.sd_t);
}

TEST_CASE("usage and validation exit codes") {
    CHECK(run_cli({"analyze", "--workload.alpha", "2"}).code == cli::kUsage);
    auto unknown = run_cli({"analyze", "--workload.beta", "2"});
    CHECK(unknown.code == cli::kUsage);
    CHECK(unknown.err.find("workload.beta") != std::string::npos);
    CHECK(run_cli({"analyze", "--format", "xml"}).code == cli::kUsage);
    CHECK(run_cli({"analyze", "--no-such-flag"}).code == cli::kUsage);
    CHECK(run_cli({}).code == cli::kUsage);
    CHECK(run_cli({"frobnicate"}).code == cli::kUsage);
    CHECK(run_cli({"analyze", "--workload.alpha"}).code == cli::kUsage);
    CHECK(run_cli({"--help"}).code == 0);
    CHECK(run_cli({"analyze", "--config", "/nonexistent/cfg.json"}).code == cli::kRuntime);
    auto bad = tmp("bad.json");
    std::ofstream(bad) << "{ not json";
    CHECK(run_cli({"analyze", "--config", bad.string()}).code == cli::kUsage);
}

TEST_CASE("optimize") {
    auto r = run_cli({"optimize", "--workload.ratio", "0.0005", "--workload.alpha", "0.6", "--servers.k_max", "200"});
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 3);
    auto c = cells(ls[2]);
    CHECK(c[0] == "analytic");
    CHECK(c[1] == "1");
    CHECK(c[2] == "1");

    auto idle = run_cli({"optimize", "--workload.alpha", "1", "--workload.rho", "1e-6"});
    REQUIRE(idle.code == 0);
    CHECK(cells(lines(idle.out)[2])[1] == "1");

    auto sim = run_cli({"optimize", "--pb", "simulated", "--workload.ratio", "0.05", "--workload.alpha", "0.6",
                        "--servers.k_max", "3", "--simulation.n", "20000", "--simulation.rounds", "2",
                        "--analytic.pb_sim_jobs", "20000", "--format", "json"});
    REQUIRE(sim.code == 0);
    auto doc = json::parse(sim.out);
    REQUIRE(doc["optimal"].size() == 2);
    CHECK(doc["optimal"][1]["source"] == "simulated");
    CHECK(doc["simulated"]["per_k"].size() == 3);
    CHECK(doc["metadata"]["pb_strategy"] == "simulated");
}

TEST_CASE("simulate") {
    auto r = run_cli({"simulate", "--workload.ratio", "0.05", "--workload.alpha", "0.6", "--servers.k_max", "2",
                      "--simulation.n", "100000", "--simulation.rounds", "3", "--format", "json"});
    REQUIRE(r.code == 0);
    auto doc = json::parse(r.out);
    REQUIRE(doc["rows"].size() == 2);
    auto k1 = doc["rows"][0];
    CHECK(k1["n"] == 3 * 99000);
    CHECK(k1["mg1_mean_t"].get<double>() == doctest::Approx(970.94).epsilon(1e-4));
    CHECK(k1["mg1_mean_rel_err"].get<double>() < 0.1);
    CHECK(doc["rows"][1]["mg1_mean_t"].is_null());
    CHECK(doc["summaries"][0]["round_mean_t"].size() == 3);

    auto trace = tmp("trace.csv");
    auto t = run_cli({"simulate", "--servers.k_max", "1", "--simulation.n", "50", "--simulation.rounds", "2",
                      "--simulation.trace_path", trace.string()});
    REQUIRE(t.code == 0);
    auto tl = lines(slurp(trace));
    CHECK(tl.size() == 51);
    CHECK(tl[0] == "index,class,arrival,wait,service,departure,impaired");
}

TEST_CASE("detect") {
    auto empty = run_cli({"detect", "--servers.k_min", "5", "--servers.k_max", "4"});
    CHECK(empty.code == cli::kUsage);

    auto r = run_cli({"detect", "--servers.k_max", "3", "--detection.n_samples", "5000"});
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 5);
    CHECK(ls[1] == "k,accuracy,impaired_fraction,threshold,p_value,n_train,n_test,seed");
    CHECK(cells(ls[2])[5] == "3960");
    CHECK(cells(ls[2])[6] == "990");

    auto b = run_cli({"detect", "--workload.alpha", "0.8", "--workload.ratio", "0.05", "--servers.k_max", "3",
                      "--detection.n_samples", "5000", "--feature", "waiting", "--binary", "--format", "json"});
    REQUIRE(b.code == 0);
    auto doc = json::parse(b.out);
    REQUIRE(doc["rows"].size() == 3);
    for (const auto& row : doc["rows"]) {
        CHECK(row["threshold"].is_number());
        CHECK(row["p_value"].get<double>() < 0.05);
        CHECK(row["n_train"] == row["n_test"]);
    }
    CHECK(doc["points"][0]["confusion"].size() == 3);
    CHECK(doc["metadata"]["config"]["detection"]["feature"] == "waiting");
}

TEST_CASE("calibrate") {
    auto base = tmp("base.csv"), attack = tmp("attack.csv"), out = tmp("calibrated.json");
    std::ofstream(base) << "response_time_ms\n50.13\n58.13\n";
    std::ofstream(attack) << "90.2\n100.2\n";
    auto missing = run_cli({"calibrate", "--baseline", "/no/such/base.csv", "--attack", attack.string()});
    CHECK(missing.code == cli::kRuntime);
    CHECK(missing.err.find("/no/such/base.csv") != std::string::npos);

    auto r = run_cli({"calibrate", "--baseline", base.string(), "--attack", attack.string(), "--out", out.string()});
    REQUIRE(r.code == 0);
    auto doc = json::parse(slurp(out));
    CHECK(doc["workload"]["ex_short"].get<double>() == doctest::Approx(54.13).epsilon(1e-12));
    CHECK(doc["workload"]["ex_long"].get<double>() == doctest::Approx(95.20).epsilon(1e-12));
    CHECK(doc["calibration"]["ratio"].get<double>() == doctest::Approx(0.5686).epsilon(1e-4 / 0.5686));

    auto direct = run_cli({"analyze", "--workload.ex_long", "95.2"});
    auto round_trip = run_cli({"analyze", "--config", out.string()});
    REQUIRE(round_trip.code == 0);
    auto a = lines(direct.out), b = lines(round_trip.out);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] == b[i]);

    auto warn = run_cli({"calibrate", "--baseline", base.string(), "--attack", attack.string(), "--rho-estimate", "0.5"});
    CHECK(warn.code == 0);
    CHECK(warn.err.find("warning") != std::string::npos);
}

TEST_CASE("sweep") {
    auto r = run_cli({"sweep"});
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 29);
    auto first = cells(ls[2]), last = cells(ls[28]);
    CHECK(first[0] == "1");
    CHECK(first[1] == "0.0005");
    CHECK(first[2] == "0.99");
    CHECK(first[3] == "0.95");
    CHECK(last[1] == "0.05");
    CHECK(last[2] == "0.6");
    CHECK(last[3] == "0.5");
    auto md = metadata_of(r.out);
    bool noted = false;
    for (const auto& n : md["notes"]) noted |= n.get<std::string>().find("1288.88") != std::string::npos;
    CHECK(noted);

    auto sub = run_cli({"sweep", "--rows", "27,3"});
    REQUIRE(sub.code == 0);
    auto sl = lines(sub.out);
    REQUIRE(sl.size() == 4);
    CHECK(cells(sl[2])[0] == "27");
    CHECK(cells(sl[3])[0] == "3");
    CHECK(run_cli({"sweep", "--rows", "28"}).code == cli::kUsage);

    auto shuffled = run_cli({"sweep", "--sweep.rhos", "0.5,0.95,0.8", "--sweep.alphas", "0.6,0.99,0.8"});
    auto sh = lines(shuffled.out);
    for (std::size_t i = 1; i < ls.size(); ++i) CHECK(sh[i] == ls[i]);
}

TEST_CASE("reruns are byte-identical") {
    std::vector<std::vector<std::string>> commands{
        {"analyze"},
        {"simulate", "--servers.k_max", "2", "--simulation.n", "20000", "--simulation.rounds", "2"},
        {"detect", "--servers.k_max", "3", "--detection.n_samples", "3000"},
        {"detect", "--servers.k_max", "3", "--detection.n_samples", "3000", "--binary", "--feature", "waiting"},
        {"sweep", "--rows", "1,2"},
        {"optimize", "--format", "json"},
    };
    int i = 0;
    for (auto args : commands) {
        auto a = tmp("det_a_" + std::to_string(i) + ".out"), b = tmp("det_b_" + std::to_string(i) + ".out");
        ++i;
        auto args_a = args, args_b = args;
        args_a.insert(args_a.end(), {"--out", a.string()});
        args_b.insert(args_b.end(), {"--out", b.string()});
        REQUIRE(run_cli(args_a).code == 0);
        REQUIRE(run_cli(args_b).code == 0);
        CHECK(slurp(a) == slurp(b));
        CHECK_FALSE(slurp(a).empty());
    }
}

TEST_CASE("shipped configs parse") {
    int count = 0;
    for (const auto& entry : fs::directory_iterator(fs::path(MGK_SOURCE_DIR) / "configs")) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        std::ifstream f(entry.path());
        auto doc = json::parse(f);
        auto cfg = cli::parse_config(doc);
        CHECK_NOTHROW(cfg.workload.build());
        ++count;
    }
    CHECK(count >= 5);
}

TEST_CASE("a scalar override of a list key becomes a one-element list") {
    nlohmann::json doc = nlohmann::json::object();
    mgk::cli::apply_override(doc, "sweep.rhos", "0.5");
    CHECK(doc["sweep"]["rhos"] == nlohmann::json::array({0.5}));
    mgk::cli::apply_override(doc, "workload.rho", "0.5");
    CHECK(doc["workload"]["rho"] == 0.5);
}
