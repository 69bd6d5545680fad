// Command-line front end: simulate, test, learn, experiment, calibrate.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "locind/discovery.hpp"
#include "locind/error.hpp"
#include "locind/experiments.hpp"
#include "locind/io.hpp"
#include "locind/litest.hpp"
#include "locind/parallel.hpp"
#include "locind/random.hpp"
#include "locind/simulator.hpp"

#ifndef LOCIND_VERSION
#define LOCIND_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace locind;

namespace {

constexpr int exit_usage = 1;
constexpr int exit_failure = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string join(const std::vector<std::string>& items, const char* sep = ", ")
{
    std::string out;
    for (const auto& s : items)
        out += (out.empty() ? "" : sep) + s;
    return out;
}

struct TestOptions {
    int order = 2;
    double alpha = 0.05;
    double kappa = 1.0;
    std::vector<double> kappa_grid;
    double support = 5.0;
    int num_basis = 6;
    int degree = 3;
    double grid_step = 0.1;
    int wald_points = 0;
    std::string link = "piecewise";
    bool no_target_history = false;
    int max_iterations = 100;
    bool literal_information = false;

    void add(CLI::App* app, bool with_order = true)
    {
        if (with_order)
            app->add_option("--order", order, "Expansion order of the nuisance model (1 or 2)")
                ->capture_default_str();
        app->add_option("--alpha", alpha, "Significance level")->capture_default_str();
        app->add_option("--kappa", kappa, "Roughness penalty weight")->capture_default_str();
        app->add_option("--kappa-grid", kappa_grid,
                        "Choose the penalty weight from this list by held-out log-likelihood")
            ->delimiter(',');
        app->add_option("--support", support, "Kernel support length")->capture_default_str();
        app->add_option("--num-basis", num_basis, "Spline basis functions per kernel")
            ->capture_default_str();
        app->add_option("--degree", degree, "Spline degree")->capture_default_str();
        app->add_option("--grid-step", grid_step, "Quadrature grid step")->capture_default_str();
        app->add_option("--wald-points", wald_points, "Wald evaluation points (0: number of basis functions)")
            ->capture_default_str();
        app->add_option("--link", link, "Link function")
            ->check(CLI::IsMember({"identity", "log", "piecewise"}))
            ->capture_default_str();
        app->add_flag("--no-target-history", no_target_history,
                      "Do not condition on the target's own history");
        app->add_option("--max-iter", max_iterations, "Newton iteration cap")->capture_default_str();
        app->add_flag("--subtract-penalty-information", literal_information,
                      "Use K - 2 kappa Omega instead of K + 2 kappa Omega in the sandwich covariance");
    }

    LITestConfig config() const
    {
        LITestConfig c;
        c.order = order;
        c.alpha = alpha;
        c.support = support;
        c.num_basis = num_basis;
        c.degree = degree;
        c.grid_step = grid_step;
        c.wald_points = wald_points;
        c.link = parse_link(link);
        c.include_target_history = !no_target_history;
        c.kappa_grid = kappa_grid;
        c.fit.kappa = kappa;
        c.fit.max_iterations = max_iterations;
        c.fit.hessian_information = !literal_information;
        if (max_iterations < 1)
            throw UsageError("--max-iter must be positive");
        try {
            c.validate();
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
        for (double k : kappa_grid)
            if (!(k >= 0))
                throw UsageError("--kappa-grid values must be nonnegative");
        return c;
    }
};

struct DataOptions {
    std::string data;
    std::string sidecar;
    std::optional<double> t_start;
    std::optional<double> t_end;
    std::optional<int> dim;
    std::optional<double> jitter;

    void add(CLI::App* app)
    {
        app->add_option("--data", data, "Event CSV with header time,mark")
            ->required()
            ->check(CLI::ExistingFile);
        app->add_option("--sidecar", sidecar, "JSON sidecar with t_start, t_end, d (default: data path with .json)");
        app->add_option("--t-start", t_start, "Window start (overrides the sidecar)");
        app->add_option("--t-end", t_end, "Window end (overrides the sidecar)");
        app->add_option("--dim", dim, "Number of marks (overrides the sidecar)");
        app->add_option("--jitter", jitter, "Separate tied times by this epsilon before validation");
    }

    struct Loaded {
        MarkedEventSequence events;
        std::vector<std::string> labels;
    };

    Loaded load() const
    {
        EventSidecar meta;
        bool have_meta = false;
        const fs::path side = sidecar.empty() ? sidecar_path(data) : fs::path(sidecar);
        if (fs::exists(side)) {
            meta = sidecar_from_json(Json::parse(read_file(side)));
            have_meta = true;
        } else if (!sidecar.empty()) {
            throw UsageError("sidecar " + sidecar + " does not exist");
        }
        RawEvents raw = read_events_csv(data);
        if (t_start)
            meta.window.start = *t_start;
        if (t_end)
            meta.window.end = *t_end;
        if (dim)
            meta.dim = *dim;
        if (!have_meta && !t_end)
            throw UsageError("no sidecar found at " + side.string() + "; pass --t-end (and --t-start, --dim)");
        if (!have_meta && !dim) {
            int max_mark = -1;
            for (int m : raw.marks)
                max_mark = std::max(max_mark, m);
            meta.dim = max_mark + 1;
        }
        if (jitter) {
            if (!(*jitter > 0))
                throw UsageError("--jitter must be positive");
            separate_ties(raw, *jitter);
        }
        return {validate_events(std::move(raw.times), std::move(raw.marks), meta.window, meta.dim),
                meta.labels};
    }
};

void emit_json(const Json& j, const std::string& out)
{
    const std::string text = j.dump(2) + "\n";
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_file_atomic(out, text);
}

fs::path with_suffix(const fs::path& path, const std::string& suffix, const std::string& ext)
{
    fs::path p = path;
    p.replace_filename(path.stem().string() + suffix + ext);
    return p;
}

std::vector<int> parse_dims(const std::string& text)
{
    std::vector<int> dims;
    try {
        const auto colon = text.find(':');
        if (colon != std::string::npos) {
            const int lo = std::stoi(text.substr(0, colon));
            const int hi = std::stoi(text.substr(colon + 1));
            if (lo > hi)
                throw UsageError("--dims range is empty");
            for (int d = lo; d <= hi; ++d)
                dims.push_back(d);
        } else {
            std::size_t pos = 0;
            while (pos <= text.size()) {
                const auto comma = text.find(',', pos);
                dims.push_back(std::stoi(text.substr(pos, comma - pos)));
                if (comma == std::string::npos)
                    break;
                pos = comma + 1;
            }
        }
    } catch (const std::logic_error&) {
        throw UsageError("--dims expects lo:hi or a comma list, got '" + text + "'");
    }
    for (int d : dims)
        if (d < 2)
            throw UsageError("--dims values must be at least 2");
    return dims;
}

Json manifest(const std::string& command, const Json& config, std::uint64_t seed, double seconds,
              const std::vector<std::string>& outputs)
{
    Json j;
    j["command"] = command;
    j["version"] = LOCIND_VERSION;
    j["root_seed"] = seed;
    j["seed_derivation"] = "per repetition: derive_seed(root, {unit, repetition})";
    j["config"] = config;
    j["wall_seconds"] = seconds;
    j["outputs"] = outputs;
    return j;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string dump_design_csv(const DesignMatrix& design)
{
    std::string out = "row,time,weight";
    for (const auto& b : design.layout.blocks())
        for (int c = 0; c < b.size; ++c)
            out += "," + b.name() + "_" + std::to_string(c);
    out += '\n';
    auto row = [&](const char* kind, double t, double w, const Eigen::MatrixXd& m, Eigen::Index i) {
        out += kind;
        out += "," + format_double(t) + "," + format_double(w);
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out += "," + format_double(m(i, c));
        out += '\n';
    };
    for (Eigen::Index i = 0; i < design.quadrature.rows(); ++i)
        row("grid", design.grid[i], design.weights[i], design.quadrature, i);
    for (Eigen::Index i = 0; i < design.events.rows(); ++i)
        row("event", design.event_times[i], 0.0, design.events, i);
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Local independence testing and graph learning for multivariate event data"};
    app.set_version_flag("--version", LOCIND_VERSION);
    app.require_subcommand(1);

    const auto& structures = benchmark_structure_names();
    const std::string structure_list = "{" + join(structures) + "}";
    auto structure_check = CLI::Validator(
        [&](std::string& value) -> std::string {
            for (const auto& s : structures)
                if (s == value)
                    return {};
            return "unknown structure '" + value + "'; expected one of " + structure_list;
        },
        "STRUCTURE in " + structure_list);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a benchmark structure or a random graph");
    std::string sim_structure;
    int sim_random_dim = 0;
    double sim_edge_prob = 0.2;
    std::uint64_t sim_seed = 1;
    double sim_horizon = 2000.0;
    double sim_burn_in = 50.0;
    std::vector<std::string> sim_observed;
    std::string sim_out;
    std::string sim_graph_out;
    auto* opt_structure = sim->add_option("--structure", sim_structure, "Benchmark structure")
                              ->check(structure_check);
    auto* opt_random = sim->add_option("--random-dim", sim_random_dim, "Sample a random graph of this dimension instead");
    opt_structure->excludes(opt_random);
    sim->add_option("--edge-prob", sim_edge_prob, "Edge probability for --random-dim")->capture_default_str();
    sim->add_option("--seed", sim_seed, "Root seed")->capture_default_str();
    sim->add_option("--horizon", sim_horizon, "Observation window length")->capture_default_str();
    sim->add_option("--burn-in", sim_burn_in, "Discarded pre-window length")->capture_default_str();
    sim->add_option("--observed", sim_observed, "Marks to keep, by label or index (default: all)")
        ->delimiter(',');
    sim->add_option("--out", sim_out, "Event CSV path; the sidecar goes next to it")->required();
    sim->add_option("--graph-out", sim_graph_out, "Write the true graph as JSON");

    // test
    auto* tst = app.add_subcommand("test", "Test j -/-> k | C");
    DataOptions tst_data;
    TestOptions tst_opts;
    int tst_j = 0;
    int tst_k = 0;
    std::vector<int> tst_cond;
    std::string tst_out;
    std::string tst_design;
    tst_data.add(tst);
    tst_opts.add(tst);
    tst->add_option("--j", tst_j, "Tested mark")->required();
    tst->add_option("--k", tst_k, "Target mark")->required();
    tst->add_option("--cond", tst_cond, "Conditioning marks, comma separated")->delimiter(',');
    tst->add_option("--out", tst_out, "Result JSON (default: stdout)");
    tst->add_option("--dump-design", tst_design, "Write the design matrix as CSV");

    // learn
    auto* lrn = app.add_subcommand("learn", "Learn a local independence graph");
    DataOptions lrn_data;
    TestOptions lrn_opts;
    int lrn_max_cond = -1;
    int lrn_threads = 0;
    std::string lrn_out;
    std::string lrn_trace;
    std::string lrn_dot;
    lrn_data.add(lrn);
    lrn_opts.add(lrn);
    lrn->add_option("--max-cond", lrn_max_cond, "Largest conditioning set (negative: d - 2)")->capture_default_str();
    lrn->add_option("--threads", lrn_threads, "Worker threads (default: LI_THREADS or all cores)");
    lrn->add_option("--out", lrn_out, "Graph JSON (default: stdout)");
    lrn->add_option("--trace", lrn_trace, "Test trace JSON");
    lrn->add_option("--dot", lrn_dot, "Graph in DOT format");

    // experiment
    auto* exp = app.add_subcommand("experiment", "Simulation studies");
    exp->require_subcommand(1);
    auto* lp = exp->add_subcommand("level-power", "Rejection rates on the benchmark structures");
    std::vector<std::string> lp_structures = structures;
    std::size_t lp_reps = 200;
    std::uint64_t lp_seed = 7;
    double lp_horizon = 2000.0;
    double lp_burn_in = 50.0;
    std::vector<int> lp_orders{1, 2};
    int lp_threads = 0;
    std::string lp_out;
    TestOptions lp_opts;
    lp->add_option("--structures", lp_structures, "Structures to run")->delimiter(',')->check(structure_check);
    lp->add_option("--reps", lp_reps, "Repetitions per structure")->capture_default_str();
    lp->add_option("--seed", lp_seed, "Root seed")->capture_default_str();
    lp->add_option("--horizon", lp_horizon, "Observation window length")->capture_default_str();
    lp->add_option("--burn-in", lp_burn_in, "Discarded pre-window length")->capture_default_str();
    lp->add_option("--orders", lp_orders, "Orders to compare")->delimiter(',')->check(CLI::IsMember({1, 2}));
    lp->add_option("--threads", lp_threads, "Worker threads (default: LI_THREADS or all cores)");
    lp->add_option("--out", lp_out, "Summary CSV; records and manifest are written beside it")->required();
    lp_opts.add(lp, false);

    auto* shd_cmd = exp->add_subcommand("shd", "Structural Hamming distance on random graphs");
    std::string shd_dims = "3:7";
    std::size_t shd_reps = 20;
    std::uint64_t shd_seed = 7;
    double shd_horizon = 2000.0;
    double shd_burn_in = 50.0;
    double shd_edge_prob = 0.2;
    std::vector<int> shd_orders{1, 2};
    int shd_threads = 0;
    std::string shd_out;
    TestOptions shd_opts;
    shd_cmd->add_option("--dims", shd_dims, "Dimensions as lo:hi or a comma list")->capture_default_str();
    shd_cmd->add_option("--reps", shd_reps, "Graphs per dimension")->capture_default_str();
    shd_cmd->add_option("--seed", shd_seed, "Root seed")->capture_default_str();
    shd_cmd->add_option("--horizon", shd_horizon, "Observation window length")->capture_default_str();
    shd_cmd->add_option("--burn-in", shd_burn_in, "Discarded pre-window length")->capture_default_str();
    shd_cmd->add_option("--edge-prob", shd_edge_prob, "Edge probability")->capture_default_str();
    shd_cmd->add_option("--orders", shd_orders, "Orders to compare")->delimiter(',')->check(CLI::IsMember({1, 2}));
    shd_cmd->add_option("--threads", shd_threads, "Worker threads (default: LI_THREADS or all cores)");
    shd_cmd->add_option("--out", shd_out, "Summary CSV; records and manifest are written beside it")->required();
    shd_opts.add(shd_cmd, false);

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "Null calibration, simulator and gradient checks");
    CalibrationConfig cal_config;
    int cal_threads = 0;
    std::string cal_out;
    bool cal_strict = false;
    TestOptions cal_opts;
    cal->add_option("--null-reps", cal_config.null_repetitions, "Null p-value repetitions")->capture_default_str();
    cal->add_option("--rescaling-reps", cal_config.rescaling_repetitions, "Time-rescaling repetitions")
        ->capture_default_str();
    cal->add_option("--count-reps", cal_config.count_repetitions, "Poisson count repetitions")->capture_default_str();
    cal->add_option("--seed", cal_config.seed, "Root seed")->capture_default_str();
    cal->add_option("--threads", cal_threads, "Worker threads (default: LI_THREADS or all cores)");
    cal->add_option("--out", cal_out, "Report JSON (default: stdout)");
    cal->add_flag("--strict", cal_strict, "Exit with status 2 when a check fails");
    cal->add_option("--orders", cal_config.orders, "Orders for the null check")->delimiter(',')->check(CLI::IsMember({1, 2}));
    cal_opts.add(cal, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (sim->parsed()) {
            if (sim_structure.empty() && sim_random_dim == 0)
                throw UsageError("simulate needs --structure " + structure_list + " or --random-dim");
            if (!(sim_horizon > 0) || !(sim_burn_in >= 0))
                throw UsageError("--horizon must be positive and --burn-in nonnegative");
            if (sim_random_dim != 0 && sim_random_dim < 1)
                throw UsageError("--random-dim must be positive");
            IntensityModelSpec spec;
            std::vector<std::string> labels;
            if (!sim_structure.empty()) {
                auto st = build_benchmark_structure(sim_structure);
                spec = st.spec;
                labels = st.labels;
            } else {
                RandomGraphConfig gc;
                gc.dim = sim_random_dim;
                gc.edge_prob = sim_edge_prob;
                gc.seed = derive_seed(sim_seed, {0});
                spec = sample_random_graph(gc).spec;
                for (int m = 0; m < spec.dim(); ++m)
                    labels.push_back(std::to_string(m));
            }
            std::vector<int> observed;
            for (const auto& token : sim_observed) {
                const auto it = std::find(labels.begin(), labels.end(), token);
                if (it != labels.end()) {
                    observed.push_back(static_cast<int>(it - labels.begin()));
                    continue;
                }
                try {
                    std::size_t used = 0;
                    const int m = std::stoi(token, &used);
                    if (used != token.size() || m < 0 || m >= spec.dim())
                        throw std::invalid_argument(token);
                    observed.push_back(m);
                } catch (const std::logic_error&) {
                    throw UsageError("--observed: unknown mark '" + token + "'; labels are {" + join(labels) + "}");
                }
            }
            SimulationConfig sc;
            sc.horizon = sim_horizon;
            sc.burn_in = sim_burn_in;
            sc.seed = sim_structure.empty() ? derive_seed(sim_seed, {1}) : sim_seed;
            Warnings warnings;
            const auto events = simulate_hawkes(spec, sc, &warnings);
            for (const auto& w : warnings)
                std::cerr << "warning: " << w << "\n";
            EventSidecar meta;
            meta.window = events.window();
            MarkedEventSequence kept = events;
            if (!observed.empty()) {
                auto restricted = restrict_to_observed(events, observed);
                kept = std::move(restricted.events);
                meta.original_marks = restricted.original_mark;
                for (int m : restricted.original_mark)
                    meta.labels.push_back(labels[static_cast<std::size_t>(m)]);
            } else {
                meta.labels = labels;
            }
            meta.dim = kept.dim();
            write_file_atomic(sim_out, events_to_csv(kept));
            const fs::path side = sidecar_path(sim_out);
            write_file_atomic(side, sidecar_to_json(meta).dump(2) + "\n");
            if (!sim_graph_out.empty())
                write_file_atomic(sim_graph_out, graph_to_json(spec.graph()).dump(2) + "\n");
            std::cerr << "wrote " << kept.size() << " events to " << sim_out << " and " << side.string() << "\n";
            return 0;
        }

        if (tst->parsed()) {
            const LITestConfig config = tst_opts.config();
            if (tst_j == tst_k)
                throw UsageError("--j and --k must differ");
            if (std::find(tst_cond.begin(), tst_cond.end(), tst_j) != tst_cond.end())
                throw UsageError("--j must not appear in --cond");
            const auto loaded = tst_data.load();
            const int d = loaded.events.dim();
            auto in_range = [d](int m) { return m >= 0 && m < d; };
            if (!in_range(tst_j) || !in_range(tst_k)
                || !std::all_of(tst_cond.begin(), tst_cond.end(), in_range))
                throw UsageError("marks must lie in [0, " + std::to_string(d) + ")");
            if (!tst_design.empty())
                write_file_atomic(tst_design, dump_design_csv(local_independence_design(
                                                  loaded.events, tst_j, tst_k, tst_cond, config)));
            const auto result = test_local_independence(loaded.events, tst_j, tst_k, tst_cond, config);
            Json j = test_result_to_json(result, config);
            j["data"] = tst_data.data;
            emit_json(j, tst_out);
            return 0;
        }

        if (lrn->parsed()) {
            CAConfig ca;
            ca.test = lrn_opts.config();
            ca.alpha = ca.test.alpha;
            ca.max_conditioning = lrn_max_cond;
            ca.threads = resolve_threads(lrn_threads);
            const auto loaded = lrn_data.load();
            const auto result = learn_graph_ca(loaded.events, ca);
            Json g = graph_to_json(result.graph);
            g["config"] = config_to_json(ca.test);
            g["config"]["max_conditioning"] = lrn_max_cond;
            g["data"] = lrn_data.data;
            emit_json(g, lrn_out);
            if (!lrn_trace.empty())
                write_file_atomic(lrn_trace, trace_to_json(result.trace).dump(2) + "\n");
            if (!lrn_dot.empty())
                write_file_atomic(lrn_dot, graph_to_dot(result.graph, loaded.labels));
            return 0;
        }

        if (lp->parsed()) {
            LevelPowerConfig c;
            c.structures = lp_structures;
            c.repetitions = lp_reps;
            c.horizon = lp_horizon;
            c.burn_in = lp_burn_in;
            c.seed = lp_seed;
            c.orders = lp_orders;
            c.test = lp_opts.config();
            c.threads = resolve_threads(lp_threads);
            if (c.repetitions == 0 || !(c.horizon > 0))
                throw UsageError("--reps and --horizon must be positive");
            const auto start = std::chrono::steady_clock::now();
            const auto result = run_level_power(c);
            const fs::path out = lp_out;
            const fs::path records = with_suffix(out, "_records", ".csv");
            const fs::path man = with_suffix(out, "_manifest", ".json");
            write_file_atomic(out, level_power_csv(result));
            write_file_atomic(records, level_power_records_csv(result));
            Json cfg{{"structures", c.structures}, {"repetitions", c.repetitions}, {"horizon", c.horizon},
                     {"burn_in", c.burn_in}, {"orders", c.orders}, {"threads", c.threads},
                     {"max_failure_rate", c.max_failure_rate}, {"test", config_to_json(c.test)}};
            Json m = manifest("experiment level-power", cfg, c.seed, seconds_since(start),
                              {out.string(), records.string()});
            m["failure_rate"] = result.failure_rate;
            write_file_atomic(man, m.dump(2) + "\n");
            std::cout << level_power_csv(result);
            if (!result.ok) {
                std::cerr << "error: failure rate " << result.failure_rate << " exceeds " << c.max_failure_rate << "\n";
                return exit_failure;
            }
            return 0;
        }

        if (shd_cmd->parsed()) {
            ShdConfig c;
            c.dims = parse_dims(shd_dims);
            c.repetitions = shd_reps;
            c.horizon = shd_horizon;
            c.burn_in = shd_burn_in;
            c.seed = shd_seed;
            c.edge_prob = shd_edge_prob;
            c.orders = shd_orders;
            c.test = shd_opts.config();
            c.alpha = c.test.alpha;
            c.threads = resolve_threads(shd_threads);
            if (c.repetitions == 0 || !(c.horizon > 0))
                throw UsageError("--reps and --horizon must be positive");
            if (!(c.edge_prob >= 0 && c.edge_prob <= 1))
                throw UsageError("--edge-prob must lie in [0, 1]");
            const auto start = std::chrono::steady_clock::now();
            const auto result = run_shd_experiment(c);
            const fs::path out = shd_out;
            const fs::path records = with_suffix(out, "_records", ".csv");
            const fs::path man = with_suffix(out, "_manifest", ".json");
            write_file_atomic(out, shd_summary_csv(result));
            write_file_atomic(records, shd_records_csv(result));
            Json cfg{{"dims", c.dims}, {"repetitions", c.repetitions}, {"horizon", c.horizon},
                     {"burn_in", c.burn_in}, {"edge_prob", c.edge_prob}, {"orders", c.orders},
                     {"alpha", c.alpha}, {"threads", c.threads}, {"max_failure_rate", c.max_failure_rate},
                     {"test", config_to_json(c.test)}};
            Json m = manifest("experiment shd", cfg, c.seed, seconds_since(start), {out.string(), records.string()});
            m["failure_rate"] = result.failure_rate;
            write_file_atomic(man, m.dump(2) + "\n");
            std::cout << shd_summary_csv(result);
            if (!result.ok) {
                std::cerr << "error: failure rate " << result.failure_rate << " exceeds " << c.max_failure_rate << "\n";
                return exit_failure;
            }
            return 0;
        }

        if (cal->parsed()) {
            cal_config.threads = resolve_threads(cal_threads);
            cal_config.test = cal_opts.config();
            const auto start = std::chrono::steady_clock::now();
            const auto report = run_calibration_suite(cal_config);
            Json checks = Json::array();
            for (const auto& c : report.checks)
                checks.push_back({{"name", c.name}, {"statistic", c.statistic}, {"threshold", c.threshold},
                                  {"pass", c.pass}, {"detail", c.detail}});
            Json j{{"checks", checks}, {"all_pass", report.all_pass()}};
            j["config"] = {{"null_repetitions", cal_config.null_repetitions},
                           {"rescaling_repetitions", cal_config.rescaling_repetitions},
                           {"count_repetitions", cal_config.count_repetitions},
                           {"gradient_points", cal_config.gradient_points},
                           {"null_horizon", cal_config.null_horizon},
                           {"rescaling_horizon", cal_config.rescaling_horizon},
                           {"count_horizon", cal_config.count_horizon},
                           {"seed", cal_config.seed},
                           {"orders", cal_config.orders},
                           {"threads", cal_config.threads},
                           {"test", config_to_json(cal_config.test)}};
            j["wall_seconds"] = seconds_since(start);
            emit_json(j, cal_out);
            return cal_strict && !report.all_pass() ? exit_failure : 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_usage;
}
