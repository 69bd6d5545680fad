#include "locind/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "locind/random.hpp"

namespace locind {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Exponentially decaying excitation carried by each present edge.
class ExcitationState {
  public:
    explicit ExcitationState(const IntensityModelSpec& spec)
        : spec_(spec), d_(spec.dim()),
          value_(static_cast<std::size_t>(d_ * d_), 0.0),
          stamp_(static_cast<std::size_t>(d_ * d_), 0.0)
    {
    }

    double contribution(int j, int k, double t) const
    {
        const auto& kern = spec_.kernel(j, k);
        const std::size_t i = static_cast<std::size_t>(j * d_ + k);
        if (!kern || value_[i] == 0.0)
            return 0.0;
        return value_[i] * std::exp(-kern->beta() * (t - stamp_[i]));
    }

    double predictor(int k, double t) const
    {
        double eta = spec_.baseline(k);
        for (int j = 0; j < d_; ++j)
            eta += contribution(j, k, t);
        return eta;
    }

    // Baseline plus excitatory contributions; an upper bound for the
    // predictor on [t, next event).
    double excitatory_predictor(int k, double t) const
    {
        double eta = spec_.baseline(k);
        for (int j = 0; j < d_; ++j) {
            const auto& kern = spec_.kernel(j, k);
            if (kern && kern->alpha() > 0)
                eta += contribution(j, k, t);
        }
        return eta;
    }

    void add_event(int j, double t)
    {
        for (int k = 0; k < d_; ++k) {
            const auto& kern = spec_.kernel(j, k);
            if (!kern)
                continue;
            const std::size_t i = static_cast<std::size_t>(j * d_ + k);
            value_[i] = contribution(j, k, t) + kern->alpha() * kern->beta();
            stamp_[i] = t;
        }
    }

  private:
    const IntensityModelSpec& spec_;
    int d_;
    std::vector<double> value_;
    std::vector<double> stamp_;
};

} // namespace

MarkedEventSequence simulate_hawkes(const IntensityModelSpec& spec, const SimulationConfig& config,
                                    Warnings* warnings)
{
    const int d = spec.dim();
    if (d < 1)
        throw Error(Errc::InvalidArgument, "model has no marks");
    if (!(config.horizon > 0) || !std::isfinite(config.horizon))
        throw Error(Errc::InvalidArgument, "horizon must be positive and finite");
    if (!(config.burn_in >= 0) || !std::isfinite(config.burn_in))
        throw Error(Errc::InvalidArgument, "burn-in must be nonnegative and finite");
    const bool fixed_bounds = !config.dominating_rates.empty();
    if (fixed_bounds && static_cast<int>(config.dominating_rates.size()) != d)
        throw Error(Errc::DimensionMismatch, "need one dominating rate per mark");

    const Link link = spec.link();
    double min_decay = inf;
    bool any_negative = false;
    bool all_nonnegative = true;
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
            if (const auto& kern = spec.kernel(j, k)) {
                min_decay = std::min(min_decay, kern->beta());
                any_negative = any_negative || kern->alpha() < 0;
                all_nonnegative = all_nonnegative && kern->alpha() >= 0;
            }
    if (warnings && link.kind() == LinkKind::Identity) {
        if (all_nonnegative) {
            const double rho = spectral_radius(integrated_kernel_matrix(spec));
            if (rho >= 1.0) {
                std::ostringstream os;
                os << "NonStationaryWarning: spectral radius " << rho << " >= 1";
                warnings->push_back(os.str());
            }
        }
        if (any_negative)
            warnings->push_back("identity link with inhibitory kernels: intensity clamped at 0");
    }
    const double refresh = std::isfinite(min_decay) ? 1.0 / min_decay : inf;

    std::vector<Rng> streams;
    streams.reserve(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k)
        streams.emplace_back(derive_seed(config.seed, {static_cast<std::uint64_t>(k)}));

    ExcitationState state(spec);
    const double t0 = -config.burn_in;
    const double t_end = config.horizon;

    std::vector<double> bound(static_cast<std::size_t>(d));
    std::vector<double> bound_time(static_cast<std::size_t>(d), t0);
    std::vector<double> next(static_cast<std::size_t>(d));

    auto adaptive_bound = [&](int k, double t) {
        return std::max(0.0, link.inverse(state.excitatory_predictor(k, t)));
    };
    auto draw_next = [&](int k, double t) {
        const double rate = bound[static_cast<std::size_t>(k)];
        next[static_cast<std::size_t>(k)] =
            rate > 0 ? t + streams[static_cast<std::size_t>(k)].exponential(rate) : inf;
    };

    for (int k = 0; k < d; ++k) {
        bound[static_cast<std::size_t>(k)] =
            fixed_bounds ? config.dominating_rates[static_cast<std::size_t>(k)] : adaptive_bound(k, t0);
        draw_next(k, t0);
    }

    std::vector<double> times;
    std::vector<int> marks;
    std::size_t accepted = 0;

    while (true) {
        const auto it = std::min_element(next.begin(), next.end());
        const double t = *it;
        if (!(t < t_end))
            break;
        const int k = static_cast<int>(it - next.begin());
        const auto ks = static_cast<std::size_t>(k);

        const double lambda = std::max(0.0, link.inverse(state.predictor(k, t)));
        if (lambda > bound[ks] * (1 + 1e-12)) {
            std::ostringstream os;
            os << "intensity " << lambda << " of mark " << k << " exceeds dominating rate "
               << bound[ks];
            throw Error(Errc::InvalidArgument, os.str());
        }
        const double u = streams[ks].uniform();
        if (u * bound[ks] < lambda) {
            if (++accepted > config.max_events)
                throw Error(Errc::ExplosionGuard, "more than " + std::to_string(config.max_events)
                                                      + " events simulated");
            state.add_event(k, t);
            if (t >= 0) {
                times.push_back(t);
                marks.push_back(k);
            }
            if (fixed_bounds) {
                draw_next(k, t);
            } else {
                for (int m = 0; m < d; ++m) {
                    bound[static_cast<std::size_t>(m)] = adaptive_bound(m, t);
                    bound_time[static_cast<std::size_t>(m)] = t;
                    draw_next(m, t);
                }
            }
        } else {
            if (!fixed_bounds && t - bound_time[ks] > refresh) {
                bound[ks] = adaptive_bound(k, t);
                bound_time[ks] = t;
            }
            draw_next(k, t);
        }
    }

    return validate_events(std::move(times), std::move(marks), Window{0.0, config.horizon}, d);
}

SampledModel sample_random_graph(const RandomGraphConfig& config)
{
    if (config.dim < 1)
        throw Error(Errc::InvalidArgument, "graph dimension must be at least 1");
    if (!(config.edge_prob >= 0 && config.edge_prob <= 1))
        throw Error(Errc::InvalidArgument, "edge probability must lie in [0, 1]");
    const int d = config.dim;
    IntensityModelSpec spec(d, std::vector<double>(static_cast<std::size_t>(d), config.baseline),
                            Link(LinkKind::PiecewiseLogLinear));
    Rng rng(config.seed);
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
            if (j == k) {
                spec.set_kernel(j, k, ExponentialKernel(config.self_alpha, config.decay));
                continue;
            }
            if (!rng.bernoulli(config.edge_prob))
                continue;
            const double sign = rng.bernoulli(config.sign_prob) ? 1.0 : -1.0;
            spec.set_kernel(j, k, ExponentialKernel(sign * config.cross_alpha_magnitude, config.decay));
        }
    }
    return {spec.graph(), std::move(spec)};
}

const std::vector<std::string>& benchmark_structure_names()
{
    static const std::vector<std::string> names{"L1", "L2", "L3", "P1", "P2", "P3"};
    return names;
}

BenchmarkStructure build_benchmark_structure(std::string_view name)
{
    constexpr double decay = 0.8;
    constexpr double baseline = 0.25;
    constexpr double self_alpha = 0.4;

    struct Weighted {
        const char* from;
        const char* to;
        double alpha;
    };
    std::vector<std::string> labels;
    std::vector<Weighted> cross;
    bool null_holds = true;

    if (name == "L1") {
        labels = {"j", "c", "k"};
        cross = {{"c", "j", 0.4}, {"c", "k", 0.4}};
    } else if (name == "L2") {
        labels = {"j", "c", "h", "k"};
        cross = {{"j", "c", 0.9}, {"c", "h", -0.6}, {"h", "k", 0.4}};
    } else if (name == "L3") {
        labels = {"j", "c", "h", "k"};
        cross = {{"c", "j", 0.4}, {"h", "c", 0.4}, {"h", "k", 0.4}, {"c", "k", -0.4}};
    } else if (name == "P1") {
        labels = {"j", "k"};
        cross = {{"j", "k", -0.6}};
        null_holds = false;
    } else if (name == "P2") {
        labels = {"j", "h", "k"};
        cross = {{"j", "h", 0.4}, {"h", "k", -0.4}};
        null_holds = false;
    } else if (name == "P3") {
        labels = {"j", "c", "h", "k"};
        cross = {{"j", "c", 0.3}, {"j", "h", 0.3}, {"c", "k", 0.2}, {"h", "k", -0.25}};
        null_holds = false;
    } else {
        throw Error(Errc::UnknownStructure,
                    "unknown structure '" + std::string(name) + "' (expected L1, L2, L3, P1, P2 or P3)");
    }

    auto index = [&](std::string_view label) {
        auto it = std::find(labels.begin(), labels.end(), label);
        return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
    };

    const int d = static_cast<int>(labels.size());
    BenchmarkStructure out{std::string(name),
                           IntensityModelSpec(d, std::vector<double>(static_cast<std::size_t>(d), baseline),
                                              Link(LinkKind::PiecewiseLogLinear)),
                           labels,
                           {},
                           index("j"),
                           index("c"),
                           index("k"),
                           null_holds};
    for (int v = 0; v < d; ++v) {
        out.spec.set_kernel(v, v, ExponentialKernel(self_alpha, decay));
        if (labels[static_cast<std::size_t>(v)] != "h")
            out.observed.push_back(v);
    }
    for (const auto& w : cross)
        out.spec.set_kernel(index(w.from), index(w.to), ExponentialKernel(w.alpha, decay));
    return out;
}

ObservedRestriction restrict_to_observed(const MarkedEventSequence& seq, std::vector<int> observed)
{
    if (observed.empty())
        throw Error(Errc::EmptyObservedSet, "observed mark set is empty");
    std::sort(observed.begin(), observed.end());
    observed.erase(std::unique(observed.begin(), observed.end()), observed.end());
    std::vector<int> remap(static_cast<std::size_t>(seq.dim()), -1);
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const int m = observed[i];
        if (m < 0 || m >= seq.dim())
            throw Error(Errc::MarkOutOfRange, "observed mark " + std::to_string(m) + " out of range");
        remap[static_cast<std::size_t>(m)] = static_cast<int>(i);
    }

    std::vector<double> times;
    std::vector<int> marks;
    auto all_times = seq.times();
    auto all_marks = seq.marks();
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const int r = remap[static_cast<std::size_t>(all_marks[i])];
        if (r < 0)
            continue;
        times.push_back(all_times[i]);
        marks.push_back(r);
    }
    return {validate_events(std::move(times), std::move(marks), seq.window(),
                            static_cast<int>(observed.size())),
            observed};
}

} // namespace locind
