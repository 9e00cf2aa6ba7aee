#pragma once

// Command-line front end: project, score, simulate, oracle-check.
//
// Exit codes: 0 ok, 1 check failed, 2 parse error, 3 bad parameters,
// 4 incompatible inputs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "stateproj/core.hpp"
#include "stateproj/label_io.hpp"
#include "stateproj/measures.hpp"
#include "stateproj/oracle.hpp"
#include "stateproj/projection.hpp"
#include "stateproj/simulate.hpp"

namespace stateproj::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kParseError = 2,
    kBadParameters = 3,
    kIncompatible = 4,
};

namespace detail {

inline nlohmann::json jumps_json(const StateSequence& s) {
    nlohmann::json out = nlohmann::json::array();
    for (const Jump& j : s.jumps()) {
        out.push_back({{"time", j.time}, {"state", j.state}});
    }
    return out;
}

inline nlohmann::json track_json(const LabelTrack& t) {
    return {{"horizon", t.horizon()},
            {"initial", t.sequence().initial_state()},
            {"jumps", jumps_json(t.sequence())}};
}

inline std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace detail

struct ProjectArgs {
    std::string input;
    std::string output;
    double gamma = 0.0;
    bool binary = false;
    bool all_optimal = false;
};

inline int cmd_project(const ProjectArgs& a, std::ostream& out, std::ostream& err) {
    const LabelFile file = load_label_file(a.input);
    if (!(a.gamma >= 0.0) || !std::isfinite(a.gamma)) {
        err << "gamma must be nonnegative\n";
        return kBadParameters;
    }
    if (a.binary && file.state_count != 2) {
        err << "--binary needs a two-state file\n";
        return kBadParameters;
    }
    ProjectionOptions opts;
    opts.binary = a.binary;
    opts.all_optimal = a.all_optimal;
    const ProjectionResult res = project(file.track.sequence(), a.gamma, {}, opts);
    const LabelTrack projected(file.track.horizon(), res.projected);
    save_label_file(a.output, projected, file.state_count);

    nlohmann::json report = {
        {"input", a.input},
        {"gamma", a.gamma},
        {"binary", a.binary},
        {"cost", res.cost},
        {"jumps_before", file.track.sequence().jump_count()},
        {"jumps_after", res.projected.jump_count()},
        {"subproblems", res.subproblems.size()},
    };
    if (a.all_optimal) {
        nlohmann::json opt = nlohmann::json::array();
        for (const StateSequence& s : res.optimal) {
            opt.push_back(detail::track_json(LabelTrack(file.track.horizon(), s)));
        }
        report["optimal"] = opt;
        report["optimal_truncated"] = res.optimal_truncated;
    }
    std::ofstream rep(a.output + ".report.json");
    rep << report.dump(2) << '\n';
    out << "cost " << detail::fixed(res.cost, 9) << ", jumps " << file.track.sequence().jump_count() << " -> "
        << res.projected.jump_count() << ", subproblems " << res.subproblems.size() << '\n';
    return kOk;
}

struct ScoreArgs {
    std::string truth;
    std::string estimate;
    std::string measure = "lts";
    double w = 0.6;
    double sigma = 0.35;
    double lambda = 0.0001;
    double zeta = 0.5;
};

inline int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
    const LabelFile truth = load_label_file(a.truth);
    const LabelFile estimate = load_label_file(a.estimate);
    if (std::abs(truth.track.horizon() - estimate.track.horizon()) > kTimeMergeTolerance ||
        truth.state_count != estimate.state_count) {
        err << "truth and estimate differ in horizon or state count\n";
        return kIncompatible;
    }
    double value = 0.0;
    try {
        if (a.measure == "accuracy") {
            value = accuracy(truth.track, estimate.track);
        } else if (a.measure == "gts") {
            value = gts_distance(extend(truth.track), extend(estimate.track), GtsParams{a.w, a.sigma});
        } else if (a.measure == "lts") {
            value = lts_measure(truth.track, estimate.track, LtsParams{a.w, a.sigma, a.lambda, a.zeta});
        } else {
            err << "unknown measure '" << a.measure << "'\n";
            return kBadParameters;
        }
    } catch (const std::invalid_argument& e) {
        err << e.what() << '\n';
        return kBadParameters;
    }
    out << detail::fixed(value, 6) << '\n';
    return kOk;
}

struct SimulateArgs {
    std::string config;
    std::string sweep;
    std::vector<double> mu1{0.1};
    std::vector<double> mu2{0.08};
    std::vector<double> gamma{0.5};
    std::vector<double> w{0.6};
    std::vector<double> lambda{0.0001};
    double sigma = 0.35;
    double zeta = 0.5;
    std::size_t reps = 1000;
    std::uint64_t seed = 1;
    std::string output = "-";
    // Flags given explicitly on the command line; they override the config file.
    std::vector<std::string> explicit_flags;
};

inline void write_sweep_csv(std::ostream& out, const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
    out << "# rng: " << kRngAlgorithm << '\n';
    out << "# seed: " << cfg.noise.seed << '\n';
    out << "# replications: " << cfg.replications << '\n';
    out << "# mu1: " << cfg.noise.mu1 << '\n';
    out << "# mu2: " << cfg.noise.mu2 << '\n';
    out << "# gamma: " << cfg.gamma << '\n';
    out << "# w: " << cfg.lts.w << '\n';
    out << "# sigma: " << cfg.lts.sigma << '\n';
    out << "# lambda: " << cfg.lts.lambda << '\n';
    out << "# zeta: " << cfg.lts.zeta << '\n';
    out << "swept_param,value,mean_accuracy_noisy,se_accuracy,mean_lts_noisy,se_lts_noisy,mean_lts_pp,se_lts_pp\n";
    for (const SweepRow& r : rows) {
        out << to_string(cfg.parameter) << ',' << r.value << ',' << detail::fixed(r.mean_accuracy_noisy, 9) << ','
            << detail::fixed(r.se_accuracy, 9) << ',' << detail::fixed(r.mean_lts_noisy, 9) << ','
            << detail::fixed(r.se_lts_noisy, 9) << ',' << detail::fixed(r.mean_lts_pp, 9) << ','
            << detail::fixed(r.se_lts_pp, 9) << '\n';
    }
}

// Resolves the flags into a sweep. The swept parameter is named by --sweep
// or is the single flag holding several values; its value list falls back to
// the standard sweep when only one value was given.
inline SweepConfig sweep_config(SimulateArgs a) {
    auto given = [&](const std::string& flag) {
        return std::find(a.explicit_flags.begin(), a.explicit_flags.end(), flag) != a.explicit_flags.end();
    };
    if (!a.config.empty()) {
        std::ifstream in(a.config);
        if (!in) {
            throw ParseError("cannot open " + a.config);
        }
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(e.what());
        }
        auto list = [&](const char* key, std::vector<double>& dst) {
            if (!j.contains(key) || given(key)) return;
            if (j[key].is_array()) {
                dst = j[key].get<std::vector<double>>();
            } else {
                dst = {j[key].get<double>()};
            }
        };
        try {
            list("mu1", a.mu1);
            list("mu2", a.mu2);
            list("gamma", a.gamma);
            list("w", a.w);
            list("lambda", a.lambda);
            if (j.contains("sigma") && !given("sigma")) a.sigma = j["sigma"].get<double>();
            if (j.contains("zeta") && !given("zeta")) a.zeta = j["zeta"].get<double>();
            if (j.contains("reps") && !given("reps")) a.reps = j["reps"].get<std::size_t>();
            if (j.contains("seed") && !given("seed")) a.seed = j["seed"].get<std::uint64_t>();
            if (j.contains("sweep") && !given("sweep")) a.sweep = j["sweep"].get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(e.what());
        }
    }

    struct Named {
        SweepParameter p;
        std::vector<double>* values;
    };
    std::vector<Named> all{{SweepParameter::mu1, &a.mu1},
                           {SweepParameter::mu2, &a.mu2},
                           {SweepParameter::gamma, &a.gamma},
                           {SweepParameter::w, &a.w},
                           {SweepParameter::lambda, &a.lambda}};
    std::optional<SweepParameter> swept;
    if (!a.sweep.empty()) {
        swept = parse_sweep_parameter(a.sweep);
    }
    for (const Named& n : all) {
        if (n.values->size() > 1) {
            if (swept && *swept != n.p) {
                throw std::invalid_argument("only the swept parameter may take several values");
            }
            swept = n.p;
        }
        if (n.values->empty()) {
            throw std::invalid_argument("every parameter needs a value");
        }
    }
    if (!swept) {
        swept = SweepParameter::mu2;
    }

    SweepConfig cfg;
    cfg.parameter = *swept;
    cfg.replications = a.reps;
    cfg.noise.mu1 = a.mu1.front();
    cfg.noise.mu2 = a.mu2.front();
    cfg.noise.seed = a.seed;
    cfg.gamma = a.gamma.front();
    cfg.lts = LtsParams{a.w.front(), a.sigma, a.lambda.front(), a.zeta};
    for (const Named& n : all) {
        if (n.p == cfg.parameter) {
            cfg.values = n.values->size() > 1 ? *n.values : default_sweep_values(n.p, cfg.noise.mu1);
        }
    }
    return cfg;
}

inline int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    SweepConfig cfg;
    try {
        cfg = sweep_config(a);
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        err << e.what() << '\n';
        return kBadParameters;
    }
    const auto rows = run_sweep(cfg);
    if (a.output == "-") {
        write_sweep_csv(out, cfg, rows);
    } else {
        std::ofstream file(a.output, std::ios::binary);
        if (!file) {
            err << "cannot write " << a.output << '\n';
            return kBadParameters;
        }
        write_sweep_csv(file, cfg, rows);
    }
    return kOk;
}

struct OracleArgs {
    std::size_t instances = 500;
    std::size_t max_jumps = 8;
    int max_states = 3;
    std::uint64_t seed = 1;
    std::string counterexample = "oracle_counterexample.json";
    bool inject_fault = false;  // test fixture: replaces projection by the identity
};

inline int cmd_oracle_check(const OracleArgs& a, std::ostream& out, std::ostream& err) {
    OracleCheckConfig cfg{a.instances, a.max_jumps, a.max_states, a.seed};
    Projector projector = default_projector;
    if (a.inject_fault) {
        projector = [](const StateSequence& f, double gamma, const StateMetric& d, const ProjectionOptions&) {
            ProjectionResult r;
            r.projected = f;
            r.cost = energy(f, f, gamma, d);
            return r;
        };
    }
    OracleCheckReport report;
    try {
        report = run_oracle_check(cfg, projector);
    } catch (const std::invalid_argument& e) {
        err << e.what() << '\n';
        return kBadParameters;
    }
    out << "checked " << report.checked << " instances, " << report.failures.size() << " failures\n";
    if (report.passed()) {
        return kOk;
    }
    const OracleMismatch& m = report.failures.front();
    nlohmann::json oracle_opt = nlohmann::json::array();
    for (const StateSequence& s : m.oracle.optimal) {
        oracle_opt.push_back({{"initial", s.initial_state()}, {"jumps", detail::jumps_json(s)}});
    }
    nlohmann::json dump = {
        {"reason", m.reason},
        {"gamma", m.instance.gamma},
        {"binary", m.binary},
        {"input", {{"initial", m.instance.f.initial_state()}, {"jumps", detail::jumps_json(m.instance.f)}}},
        {"projected", {{"initial", m.projected.initial_state()}, {"jumps", detail::jumps_json(m.projected)}}},
        {"project_cost", m.project_cost},
        {"oracle_cost", m.oracle.cost},
        {"oracle_optimal", oracle_opt},
        {"failures", report.failures.size()},
    };
    std::ofstream file(a.counterexample);
    file << dump.dump(2) << '\n';
    err << "counterexample written to " << a.counterexample << '\n';
    return kCheckFailed;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Minimum-duration projection and timing-tolerant scoring of state sequences"};
    app.require_subcommand(1);

    ProjectArgs pa;
    auto* project_cmd = app.add_subcommand("project", "Remove implausibly short events from a label file");
    project_cmd->add_option("input", pa.input, "Label file")->required();
    project_cmd->add_option("--gamma", pa.gamma, "Jump penalty / minimum event duration (s)")->required();
    project_cmd->add_flag("--binary", pa.binary, "Use the two-state graph");
    project_cmd->add_flag("--all-optimal", pa.all_optimal, "List every optimal projection in the report");
    project_cmd->add_option("--out", pa.output, "Output label file")->required();

    ScoreArgs sa;
    auto* score_cmd = app.add_subcommand("score", "Score an estimate against reference labels");
    score_cmd->add_option("truth", sa.truth, "Reference label file")->required();
    score_cmd->add_option("estimate", sa.estimate, "Estimated label file")->required();
    score_cmd->add_option("--measure", sa.measure, "accuracy | gts | lts")->capture_default_str();
    score_cmd->add_option("--w", sa.w)->capture_default_str();
    score_cmd->add_option("--sigma", sa.sigma)->capture_default_str();
    score_cmd->add_option("--lambda", sa.lambda)->capture_default_str();
    score_cmd->add_option("--zeta", sa.zeta)->capture_default_str();

    SimulateArgs ma;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a noisy-label simulation sweep");
    sim_cmd->add_option("--config", ma.config, "JSON file with sweep settings");
    sim_cmd->add_option("--sweep", ma.sweep, "mu1 | mu2 | gamma | w | lambda");
    sim_cmd->add_option("--mu1", ma.mu1)->delimiter(',')->capture_default_str();
    sim_cmd->add_option("--mu2", ma.mu2)->delimiter(',')->capture_default_str();
    sim_cmd->add_option("--gamma", ma.gamma)->delimiter(',')->capture_default_str();
    sim_cmd->add_option("--w", ma.w)->delimiter(',')->capture_default_str();
    sim_cmd->add_option("--lambda", ma.lambda)->delimiter(',')->capture_default_str();
    sim_cmd->add_option("--sigma", ma.sigma)->capture_default_str();
    sim_cmd->add_option("--zeta", ma.zeta)->capture_default_str();
    sim_cmd->add_option("--reps", ma.reps)->capture_default_str();
    sim_cmd->add_option("--seed", ma.seed)->capture_default_str();
    sim_cmd->add_option("--out", ma.output, "CSV output path, '-' for stdout")->capture_default_str();

    OracleArgs oa;
    auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare projection against brute force");
    oracle_cmd->add_option("--instances", oa.instances)->capture_default_str();
    oracle_cmd->add_option("--max-jumps", oa.max_jumps)->capture_default_str();
    oracle_cmd->add_option("--max-states", oa.max_states)->capture_default_str();
    oracle_cmd->add_option("--seed", oa.seed)->capture_default_str();
    oracle_cmd->add_option("--out", oa.counterexample, "Counterexample file")->capture_default_str();
    oracle_cmd->add_flag("--inject-fault", oa.inject_fault)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kBadParameters;
    }

    try {
        if (*project_cmd) {
            return cmd_project(pa, out, err);
        }
        if (*score_cmd) {
            return cmd_score(sa, out, err);
        }
        if (*sim_cmd) {
            for (const char* flag : {"sweep", "mu1", "mu2", "gamma", "w", "lambda", "sigma", "zeta", "reps", "seed"}) {
                if (sim_cmd->count(std::string("--") + flag) > 0) {
                    ma.explicit_flags.emplace_back(flag);
                }
            }
            return cmd_simulate(ma, out, err);
        }
        if (*oracle_cmd) {
            return cmd_oracle_check(oa, out, err);
        }
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kParseError;
    } catch (const std::invalid_argument& e) {
        err << e.what() << '\n';
        return kBadParameters;
    }
    return kBadParameters;
}

}  // namespace stateproj::cli
