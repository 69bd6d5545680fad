#include "locind/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "locind/estimation.hpp"
#include "locind/features.hpp"
#include "locind/io.hpp"
#include "locind/parallel.hpp"
#include "locind/penalty.hpp"
#include "locind/random.hpp"
#include "locind/simulator.hpp"

namespace locind {

namespace {

std::uint64_t structure_index(const std::string& name)
{
    const auto& names = benchmark_structure_names();
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        std::string list;
        for (const auto& n : names)
            list += (list.empty() ? "" : ", ") + n;
        throw Error(Errc::UnknownStructure, "unknown structure '" + name + "'; expected one of {" + list + "}");
    }
    return static_cast<std::uint64_t>(it - names.begin());
}

void check_orders(const std::vector<int>& orders)
{
    if (orders.empty())
        throw Error(Errc::InvalidArgument, "at least one order is required");
    for (int o : orders)
        if (o != 1 && o != 2)
            throw Error(Errc::InvalidArgument, "orders must be 1 or 2");
}

int position_of(const std::vector<int>& original_mark, int mark)
{
    const auto it = std::find(original_mark.begin(), original_mark.end(), mark);
    if (it == original_mark.end())
        throw Error(Errc::InvalidArgument, "structure mark is not observed");
    return static_cast<int>(it - original_mark.begin());
}

std::string csv_text(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

const LevelPowerRow& LevelPowerResult::row(const std::string& structure, int order) const
{
    for (const auto& r : rows)
        if (r.structure == structure && r.order == order)
            return r;
    throw Error(Errc::InvalidArgument, "no row for " + structure + " at order " + std::to_string(order));
}

LevelPowerResult run_level_power(const LevelPowerConfig& config)
{
    check_orders(config.orders);
    config.test.validate();
    if (config.repetitions == 0)
        throw Error(Errc::InvalidArgument, "repetitions must be positive");
    std::vector<BenchmarkStructure> structures;
    std::vector<std::uint64_t> indices;
    for (const auto& name : config.structures) {
        indices.push_back(structure_index(name));
        structures.push_back(build_benchmark_structure(name));
    }

    const std::size_t n_orders = config.orders.size();
    const std::size_t units = structures.size() * config.repetitions;
    std::vector<LevelPowerRecord> records(units * n_orders);

    parallel_for(units, resolve_threads(config.threads), [&](std::size_t u) {
        const std::size_t s = u / config.repetitions;
        const std::size_t rep = u % config.repetitions;
        const BenchmarkStructure& st = structures[s];
        const std::uint64_t seed = derive_seed(config.seed, {indices[s], rep});
        auto slot = [&](std::size_t o) -> LevelPowerRecord& { return records[u * n_orders + o]; };
        for (std::size_t o = 0; o < n_orders; ++o) {
            auto& r = slot(o);
            r.structure = st.name;
            r.repetition = rep;
            r.seed = seed;
            r.order = config.orders[o];
        }
        try {
            SimulationConfig sim;
            sim.horizon = config.horizon;
            sim.burn_in = config.burn_in;
            sim.seed = seed;
            const auto full = simulate_hawkes(st.spec, sim);
            const auto obs = restrict_to_observed(full, st.observed);
            const int j = position_of(obs.original_mark, st.j);
            const int k = position_of(obs.original_mark, st.k);
            std::vector<int> cond;
            if (st.c >= 0)
                cond.push_back(position_of(obs.original_mark, st.c));
            const FeatureCache cache(obs.events, config.test.basis(), config.test.grid_step);
            for (std::size_t o = 0; o < n_orders; ++o) {
                auto& r = slot(o);
                try {
                    LITestConfig tc = config.test;
                    tc.order = config.orders[o];
                    const auto res = test_local_independence(obs.events, j, k, cond, tc, &cache);
                    r.p_value = res.p_value();
                    r.reject = res.reject;
                    if (res.mark_missing)
                        r.note = "mark missing";
                } catch (const Error& e) {
                    r.failed = true;
                    r.note = e.what();
                }
            }
        } catch (const Error& e) {
            for (std::size_t o = 0; o < n_orders; ++o) {
                slot(o).failed = true;
                slot(o).note = e.what();
            }
        }
    });

    LevelPowerResult result;
    std::size_t failures = 0;
    for (std::size_t s = 0; s < structures.size(); ++s)
        for (std::size_t o = 0; o < n_orders; ++o) {
            LevelPowerRow row;
            row.structure = structures[s].name;
            row.order = config.orders[o];
            row.null_holds = structures[s].null_holds;
            for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
                const auto& r = records[(s * config.repetitions + rep) * n_orders + o];
                if (r.failed) {
                    ++row.failures;
                    continue;
                }
                ++row.rejections.trials;
                if (r.reject)
                    ++row.rejections.successes;
            }
            failures += row.failures;
            result.rows.push_back(row);
        }
    result.records = std::move(records);
    result.failure_rate = result.records.empty()
                              ? 0.0
                              : static_cast<double>(failures) / static_cast<double>(result.records.size());
    result.ok = result.failure_rate <= config.max_failure_rate;
    return result;
}

std::string level_power_csv(const LevelPowerResult& result)
{
    std::string out = "structure,order,null_holds,trials,rejections,fraction,standard_error,failures\n";
    for (const auto& r : result.rows) {
        out += r.structure + ',' + std::to_string(r.order) + ',' + (r.null_holds ? "true" : "false") + ',' +
               std::to_string(r.rejections.trials) + ',' + std::to_string(r.rejections.successes) + ',' +
               format_double(r.rejections.value()) + ',' + format_double(r.rejections.standard_error()) + ',' +
               std::to_string(r.failures) + '\n';
    }
    return out;
}

std::string level_power_records_csv(const LevelPowerResult& result)
{
    std::string out = "structure,repetition,seed,order,p_value,reject,failed,note\n";
    for (const auto& r : result.records) {
        out += r.structure + ',' + std::to_string(r.repetition) + ',' + std::to_string(r.seed) + ',' +
               std::to_string(r.order) + ',' + format_double(r.p_value) + ',' + (r.reject ? "1" : "0") + ',' +
               (r.failed ? "1" : "0") + ',' + csv_text(r.note) + '\n';
    }
    return out;
}

const ShdSummary& ShdResult::at(int dim, int order) const
{
    for (const auto& s : summary)
        if (s.dim == dim && s.order == order)
            return s;
    throw Error(Errc::InvalidArgument, "no summary for d = " + std::to_string(dim) + " at order " + std::to_string(order));
}

ShdResult run_shd_experiment(const ShdConfig& config)
{
    check_orders(config.orders);
    config.test.validate();
    if (config.repetitions == 0)
        throw Error(Errc::InvalidArgument, "repetitions must be positive");
    for (int d : config.dims)
        if (d < 2)
            throw Error(Errc::InvalidArgument, "dimensions must be at least 2");

    const std::size_t n_orders = config.orders.size();
    const std::size_t units = config.dims.size() * config.repetitions;
    std::vector<ShdRecord> records(units * n_orders);

    parallel_for(units, resolve_threads(config.threads), [&](std::size_t u) {
        const int dim = config.dims[u / config.repetitions];
        const std::size_t rep = u % config.repetitions;
        const auto d64 = static_cast<std::uint64_t>(dim);
        const std::uint64_t seed = derive_seed(config.seed, {d64, rep});
        auto slot = [&](std::size_t o) -> ShdRecord& { return records[u * n_orders + o]; };
        for (std::size_t o = 0; o < n_orders; ++o) {
            auto& r = slot(o);
            r.dim = dim;
            r.repetition = rep;
            r.seed = seed;
            r.order = config.orders[o];
        }
        try {
            RandomGraphConfig gc;
            gc.dim = dim;
            gc.edge_prob = config.edge_prob;
            gc.seed = derive_seed(seed, {0});
            const auto model = sample_random_graph(gc);
            SimulationConfig sim;
            sim.horizon = config.horizon;
            sim.burn_in = config.burn_in;
            sim.seed = derive_seed(seed, {1});
            const auto events = simulate_hawkes(model.spec, sim);
            const int true_edges = model.graph.edge_count() - dim;
            for (std::size_t o = 0; o < n_orders; ++o) {
                auto& r = slot(o);
                r.true_edges = true_edges;
                try {
                    CAConfig ca;
                    ca.test = config.test;
                    ca.test.order = config.orders[o];
                    ca.test.alpha = config.alpha;
                    ca.alpha = config.alpha;
                    ca.threads = 1;
                    const auto learned = learn_graph_ca(events, ca);
                    r.learned_edges = learned.graph.edge_count() - dim;
                    r.shd = shd(learned.graph, model.graph);
                    r.tests = learned.trace.records.size();
                    r.failed_tests = static_cast<std::size_t>(
                        std::count_if(learned.trace.records.begin(), learned.trace.records.end(),
                                      [](const TraceRecord& t) { return t.action == TraceAction::Failed; }));
                } catch (const Error& e) {
                    r.failed = true;
                    r.note = e.what();
                }
            }
        } catch (const Error& e) {
            for (std::size_t o = 0; o < n_orders; ++o) {
                slot(o).failed = true;
                slot(o).note = e.what();
            }
        }
    });

    ShdResult result;
    std::size_t failures = 0;
    for (std::size_t di = 0; di < config.dims.size(); ++di)
        for (std::size_t o = 0; o < n_orders; ++o) {
            std::vector<double> values;
            for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
                const auto& r = records[(di * config.repetitions + rep) * n_orders + o];
                if (r.failed)
                    ++failures;
                else
                    values.push_back(r.shd);
            }
            ShdSummary s;
            s.dim = config.dims[di];
            s.order = config.orders[o];
            s.n = values.size();
            if (!values.empty()) {
                double sum = 0.0;
                for (double v : values)
                    sum += v;
                s.mean = sum / static_cast<double>(values.size());
                s.q25 = quantile(values, 0.25);
                s.median = median(values);
                s.q75 = quantile(values, 0.75);
            } else {
                s.mean = s.q25 = s.median = s.q75 = std::nan("");
            }
            result.summary.push_back(s);
        }
    result.records = std::move(records);
    result.failure_rate = result.records.empty()
                              ? 0.0
                              : static_cast<double>(failures) / static_cast<double>(result.records.size());
    result.ok = result.failure_rate <= config.max_failure_rate;
    return result;
}

std::string shd_summary_csv(const ShdResult& result)
{
    std::string out = "dim,order,n,mean,q25,median,q75\n";
    for (const auto& s : result.summary)
        out += std::to_string(s.dim) + ',' + std::to_string(s.order) + ',' + std::to_string(s.n) + ',' +
               format_double(s.mean) + ',' + format_double(s.q25) + ',' + format_double(s.median) + ',' +
               format_double(s.q75) + '\n';
    return out;
}

std::string shd_records_csv(const ShdResult& result)
{
    std::string out = "dim,repetition,seed,order,true_edges,learned_edges,shd,tests,failed_tests,failed,note\n";
    for (const auto& r : result.records)
        out += std::to_string(r.dim) + ',' + std::to_string(r.repetition) + ',' + std::to_string(r.seed) + ',' +
               std::to_string(r.order) + ',' + std::to_string(r.true_edges) + ',' +
               std::to_string(r.learned_edges) + ',' + std::to_string(r.shd) + ',' + std::to_string(r.tests) +
               ',' + std::to_string(r.failed_tests) + ',' + (r.failed ? "1" : "0") + ',' + csv_text(r.note) +
               '\n';
    return out;
}

bool CalibrationReport::all_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CalibrationCheck& c) { return c.pass; });
}

CalibrationCheck null_pvalue_check(const CalibrationConfig& config, int order)
{
    LITestConfig tc = config.test;
    tc.order = order;
    tc.validate();
    const IntensityModelSpec spec(2, {0.25, 0.25}, tc.link);
    std::vector<double> pvalues(config.null_repetitions, 0.0);
    std::vector<char> failed(config.null_repetitions, 0);
    parallel_for(config.null_repetitions, resolve_threads(config.threads), [&](std::size_t rep) {
        try {
            SimulationConfig sim;
            sim.horizon = config.null_horizon;
            sim.burn_in = 0.0;
            sim.seed = derive_seed(config.seed, {1, rep});
            const auto events = simulate_hawkes(spec, sim);
            pvalues[rep] = test_local_independence(events, 0, 1, {}, tc).p_value();
        } catch (const Error&) {
            failed[rep] = 1;
        }
    });
    std::vector<double> usable;
    for (std::size_t i = 0; i < pvalues.size(); ++i)
        if (!failed[i])
            usable.push_back(pvalues[i]);
    CalibrationCheck check;
    check.name = "null_pvalue_ks_order" + std::to_string(order);
    check.threshold = 0.08;
    check.statistic = usable.empty() ? 1.0 : ks_distance_uniform(usable);
    const std::size_t failures = pvalues.size() - usable.size();
    check.pass = check.statistic < check.threshold &&
                 static_cast<double>(failures) <= 0.02 * static_cast<double>(pvalues.size());
    check.detail = std::to_string(usable.size()) + " p-values, " + std::to_string(failures) + " failures";
    return check;
}

CalibrationCheck time_rescaling_check(const CalibrationConfig& config)
{
    IntensityModelSpec spec(2, {0.25, 0.25});
    spec.set_kernel(0, 0, ExponentialKernel(0.4, 0.8));
    spec.set_kernel(1, 1, ExponentialKernel(0.4, 0.8));
    spec.set_kernel(0, 1, ExponentialKernel(0.4, 0.8));
    spec.set_kernel(1, 0, ExponentialKernel(-0.3, 1.2));
    std::vector<std::vector<double>> gaps(config.rescaling_repetitions);
    parallel_for(config.rescaling_repetitions, resolve_threads(config.threads), [&](std::size_t rep) {
        SimulationConfig sim;
        sim.horizon = config.rescaling_horizon;
        sim.burn_in = 0.0;
        sim.seed = derive_seed(config.seed, {2, rep});
        const auto events = simulate_hawkes(spec, sim);
        for (int k = 0; k < spec.dim(); ++k)
            for (double g : compensator_increments(spec, events, k))
                gaps[rep].push_back(-std::expm1(-g));
    });
    std::vector<double> pooled;
    for (const auto& g : gaps)
        pooled.insert(pooled.end(), g.begin(), g.end());
    CalibrationCheck check;
    check.name = "time_rescaling_ks";
    check.threshold = 0.01;
    const double distance = ks_distance_uniform(pooled);
    check.statistic = ks_p_value(distance, pooled.size());
    check.pass = check.statistic > check.threshold;
    check.detail = std::to_string(pooled.size()) + " gaps, KS distance " + format_double(distance);
    return check;
}

CalibrationCheck poisson_count_check(const CalibrationConfig& config)
{
    const double rate = 0.25;
    const IntensityModelSpec spec(1, {rate}, Link(LinkKind::Identity));
    const double mean = rate * config.count_horizon;
    std::vector<char> inside(config.count_repetitions, 0);
    parallel_for(config.count_repetitions, resolve_threads(config.threads), [&](std::size_t rep) {
        SimulationConfig sim;
        sim.horizon = config.count_horizon;
        sim.burn_in = 0.0;
        sim.seed = derive_seed(config.seed, {3, rep});
        const auto n = static_cast<double>(simulate_hawkes(spec, sim).size());
        inside[rep] = std::abs(n - mean) <= 4.0 * std::sqrt(mean);
    });
    CalibrationCheck check;
    check.name = "poisson_count_4sd";
    check.threshold = 0.99;
    const auto hits = static_cast<std::size_t>(std::count(inside.begin(), inside.end(), 1));
    check.statistic = inside.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(inside.size());
    check.pass = check.statistic >= check.threshold;
    check.detail = std::to_string(hits) + " of " + std::to_string(inside.size()) + " seeds";
    return check;
}

namespace {

double max_relative_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numeric)
{
    const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
    return (analytic - numeric).cwiseAbs().maxCoeff() / scale;
}

// Central-difference step for coordinate i that keeps every row inside one
// smooth piece of the objective: no row crosses the piecewise knot, and event
// rows under the identity link move by at most 0.1% of their predictor.
double smooth_step(const DesignMatrix& design, const Link& link, const Eigen::VectorXd& beta, Eigen::Index i)
{
    double h = 1e-5 * std::max(1.0, std::abs(beta[i]));
    auto limit = [&](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, bool events) {
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            const double xi = std::abs(x(r, i));
            if (xi == 0.0)
                continue;
            if (link.kind() == LinkKind::PiecewiseLogLinear)
                h = std::min(h, 0.5 * std::abs(y[r] - 1.0) / xi);
            else if (link.kind() == LinkKind::Identity && events)
                h = std::min(h, 1e-3 * std::abs(y[r]) / xi);
        }
    };
    limit(design.quadrature, design.quadrature * beta, false);
    limit(design.events, design.events * beta, true);
    return std::max(h, 1e-10 * std::max(1.0, std::abs(beta[i])));
}

} // namespace

CalibrationCheck gradient_check(const CalibrationConfig& config)
{
    IntensityModelSpec spec(3, {0.5, 0.5, 0.5});
    spec.set_kernel(0, 1, ExponentialKernel(0.3, 0.8));
    spec.set_kernel(1, 2, ExponentialKernel(0.3, 0.8));
    SimulationConfig sim;
    sim.horizon = 200.0;
    sim.seed = derive_seed(config.seed, {4});
    const auto events = simulate_hawkes(spec, sim);
    const SplineBasis basis = config.test.basis();
    Warnings w;
    const auto design = build_design(events, DesignRequest{2, {1, 2}, 2, 0}, basis, config.test.grid_step, &w);
    const Eigen::MatrixXd omega = roughness_penalty(design.layout, basis);
    const double kappa = config.test.fit.kappa;

    double worst = 0.0;
    std::size_t evaluated = 0;
    for (LinkKind kind : {LinkKind::Identity, LinkKind::Log, LinkKind::PiecewiseLogLinear}) {
        const Link link(kind);
        const double rate = static_cast<double>(design.events.rows()) / events.window().length();
        for (std::size_t p = 0; p < config.gradient_points; ++p) {
            Rng rng(derive_seed(config.seed, {5, static_cast<std::uint64_t>(kind), p}));
            Eigen::VectorXd beta(design.layout.columns());
            LikelihoodDerivatives d;
            // Redraw until every event-row intensity is positive.
            for (int attempt = 0; attempt < 100; ++attempt) {
                for (Eigen::Index i = 0; i < beta.size(); ++i)
                    beta[i] = 0.1 * (rng.uniform() - 0.5);
                beta[0] = link.eval(rate) + 0.5 * (rng.uniform() - 0.5);
                if (kind == LinkKind::Identity)
                    beta[0] += 1.0;
                d = penalized_loglik_derivatives(beta, design, link, omega, kappa, true);
                if (d.finite)
                    break;
            }
            if (!d.finite)
                continue;
            Eigen::VectorXd g_num(beta.size());
            Eigen::MatrixXd h_num(beta.size(), beta.size());
            for (Eigen::Index i = 0; i < beta.size(); ++i) {
                const double h = smooth_step(design, link, beta, i);
                Eigen::VectorXd up = beta, down = beta;
                up[i] += h;
                down[i] -= h;
                const auto du = penalized_loglik_derivatives(up, design, link, omega, kappa, false);
                const auto dd = penalized_loglik_derivatives(down, design, link, omega, kappa, false);
                g_num[i] = (du.value - dd.value) / (2 * h);
                h_num.col(i) = (du.gradient - dd.gradient) / (2 * h);
            }
            worst = std::max({worst, max_relative_error(d.gradient, g_num), max_relative_error(d.hessian, h_num)});
            ++evaluated;
        }
    }
    CalibrationCheck check;
    check.name = "gradient_finite_difference";
    check.threshold = 1e-5;
    check.statistic = worst;
    check.pass = evaluated == 3 * config.gradient_points && worst < check.threshold;
    check.detail = std::to_string(evaluated) + " points over 3 links";
    return check;
}

CalibrationReport run_calibration_suite(const CalibrationConfig& config)
{
    check_orders(config.orders);
    CalibrationReport report;
    for (int order : config.orders)
        report.checks.push_back(null_pvalue_check(config, order));
    report.checks.push_back(time_rescaling_check(config));
    report.checks.push_back(poisson_count_check(config));
    report.checks.push_back(gradient_check(config));
    return report;
}

} // namespace locind
