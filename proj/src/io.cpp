#include "locind/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unistd.h>

namespace locind {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& content)
{
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(Errc::Io, "cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out)
            throw Error(Errc::Io, "failed writing " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(Errc::Io, "cannot rename onto " + path.string());
    }
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::Io, "cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string format_double(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& field, std::size_t line, const char* what)
{
    T value{};
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw Error(Errc::Parse, "line " + std::to_string(line) + ": invalid " + what + " '" + field + "'");
    return value;
}

} // namespace

RawEvents parse_events_csv(const std::string& text)
{
    RawEvents raw;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string row = trim(line);
        if (row.empty())
            continue;
        if (!header_seen) {
            std::string compact;
            std::remove_copy(row.begin(), row.end(), std::back_inserter(compact), ' ');
            if (compact != "time,mark")
                throw Error(Errc::Parse, "expected header 'time,mark', got '" + row + "'");
            header_seen = true;
            continue;
        }
        const auto comma = row.find(',');
        if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos)
            throw Error(Errc::Parse, "line " + std::to_string(lineno) + ": expected two fields");
        std::string t = trim(std::string_view(row).substr(0, comma));
        if (!t.empty() && t.front() == '+')
            t.erase(0, 1);
        raw.times.push_back(parse_number<double>(t, lineno, "time"));
        raw.marks.push_back(parse_number<int>(trim(std::string_view(row).substr(comma + 1)), lineno, "mark"));
    }
    if (!header_seen)
        throw Error(Errc::Parse, "missing header 'time,mark'");
    return raw;
}

RawEvents read_events_csv(const fs::path& path)
{
    return parse_events_csv(read_file(path));
}

std::string events_to_csv(const MarkedEventSequence& seq)
{
    std::string out = "time,mark\n";
    auto times = seq.times();
    auto marks = seq.marks();
    for (std::size_t i = 0; i < seq.size(); ++i) {
        out += format_double(times[i]);
        out += ',';
        out += std::to_string(marks[i]);
        out += '\n';
    }
    return out;
}

void separate_ties(RawEvents& raw, double epsilon)
{
    if (!(epsilon > 0))
        throw Error(Errc::InvalidArgument, "tie separation needs a positive epsilon");
    if (raw.times.size() != raw.marks.size())
        throw Error(Errc::LengthMismatch, "times and marks differ in length");
    std::vector<std::size_t> order(raw.times.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return raw.times[a] < raw.times[b]; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        double& cur = raw.times[order[i]];
        const double prev = raw.times[order[i - 1]];
        if (cur <= prev)
            cur = prev + epsilon;
    }
}

Json sidecar_to_json(const EventSidecar& s)
{
    Json j;
    j["t_start"] = s.window.start;
    j["t_end"] = s.window.end;
    j["d"] = s.dim;
    if (!s.labels.empty())
        j["labels"] = s.labels;
    if (!s.original_marks.empty())
        j["original_marks"] = s.original_marks;
    return j;
}

EventSidecar sidecar_from_json(const Json& j)
{
    try {
        EventSidecar s;
        s.window = Window{j.at("t_start").get<double>(), j.at("t_end").get<double>()};
        s.dim = j.at("d").get<int>();
        if (j.contains("labels"))
            s.labels = j.at("labels").get<std::vector<std::string>>();
        if (j.contains("original_marks"))
            s.original_marks = j.at("original_marks").get<std::vector<int>>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Parse, std::string("sidecar: ") + e.what());
    }
}

fs::path sidecar_path(const fs::path& csv)
{
    fs::path p = csv;
    p.replace_extension(".json");
    return p;
}

Json graph_to_json(const DirectedGraph& g)
{
    Json j;
    j["d"] = g.dim();
    Json edges = Json::array();
    for (auto [a, b] : g.edges())
        edges.push_back({a, b});
    j["edges"] = edges;
    return j;
}

DirectedGraph graph_from_json(const Json& j)
{
    try {
        DirectedGraph g(j.at("d").get<int>());
        for (const auto& e : j.at("edges"))
            g.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Parse, std::string("graph: ") + e.what());
    }
}

std::string graph_to_dot(const DirectedGraph& g, const std::vector<std::string>& labels)
{
    std::ostringstream os;
    os << "digraph local_independence {\n";
    for (int v = 0; v < g.dim(); ++v) {
        os << "  " << v;
        if (static_cast<std::size_t>(v) < labels.size())
            os << " [label=\"" << labels[static_cast<std::size_t>(v)] << "\"]";
        os << ";\n";
    }
    for (auto [a, b] : g.edges())
        os << "  " << a << " -> " << b << ";\n";
    os << "}\n";
    return os.str();
}

Json config_to_json(const LITestConfig& c)
{
    Json j;
    j["order"] = c.order;
    j["alpha"] = c.alpha;
    j["support"] = c.support;
    j["num_basis"] = c.num_basis;
    j["degree"] = c.degree;
    j["grid_step"] = c.grid_step;
    j["wald_points"] = c.wald_points > 0 ? c.wald_points : c.num_basis;
    j["link"] = std::string(to_string(c.link.kind()));
    j["include_target_history"] = c.include_target_history;
    j["kappa_grid"] = c.kappa_grid;
    j["kappa_holdout_fraction"] = c.kappa_holdout_fraction;
    j["fit"] = {{"kappa", c.fit.kappa},
                {"max_iterations", c.fit.max_iterations},
                {"gradient_tolerance", c.fit.gradient_tolerance},
                {"max_step_halvings", c.fit.max_step_halvings},
                {"ridge_jitter", c.fit.ridge_jitter},
                {"hessian_information", c.fit.hessian_information}};
    return j;
}

Json fit_to_json(const FittedIntensityModel& fit)
{
    Json j;
    Json blocks = Json::object();
    for (const auto& b : fit.layout.blocks()) {
        const Eigen::VectorXd coef = fit.block_coefficients(b);
        const Eigen::VectorXd var = fit.covariance.diagonal().segment(b.offset, b.size);
        blocks[b.name()] = {{"coefficients", std::vector<double>(coef.data(), coef.data() + coef.size())},
                            {"covariance_diagonal", std::vector<double>(var.data(), var.data() + var.size())}};
    }
    j["blocks"] = blocks;
    j["penalized_loglik"] = fit.penalized_loglik;
    j["loglik"] = fit.loglik;
    j["information_jitter"] = fit.information_jitter;
    const auto& c = fit.convergence;
    j["convergence"] = {{"converged", c.converged},
                        {"iterations", c.iterations},
                        {"gradient_norm", c.gradient_norm},
                        {"ridge_escalations", c.ridge_escalations},
                        {"message", c.message}};
    return j;
}

Json test_result_to_json(const LITestResult& r, const LITestConfig& config)
{
    Json j;
    j["hypothesis"] = {{"j", r.hypothesis.j},
                       {"k", r.hypothesis.k},
                       {"conditioning", r.hypothesis.conditioning},
                       {"order", r.hypothesis.order}};
    j["p_value"] = r.wald.p_value;
    j["statistic"] = r.wald.statistic;
    j["df"] = r.wald.df;
    j["reject"] = r.reject;
    j["mark_missing"] = r.mark_missing;
    j["grid"] = r.wald.grid;
    j["kernel_values"] = std::vector<double>(r.wald.kernel_values.data(),
                                             r.wald.kernel_values.data() + r.wald.kernel_values.size());
    if (r.fit)
        j["fit"] = fit_to_json(*r.fit);
    if (r.kappa_selection)
        j["kappa_selection"] = {{"kappa", r.kappa_selection->kappa},
                                {"candidates", r.kappa_selection->candidates},
                                {"heldout_loglik", r.kappa_selection->heldout_loglik}};
    j["warnings"] = r.warnings;
    j["config"] = config_to_json(config);
    return j;
}

Json trace_to_json(const DiscoveryTrace& trace)
{
    Json records = Json::array();
    for (const auto& r : trace.records) {
        Json rec{{"level", r.level},
                 {"j", r.j},
                 {"k", r.k},
                 {"conditioning", r.conditioning},
                 {"p_value", r.p_value},
                 {"action", to_string(r.action)}};
        if (!r.note.empty())
            rec["note"] = r.note;
        records.push_back(rec);
    }
    return Json{{"d", trace.dim}, {"records", records}};
}

} // namespace locind
