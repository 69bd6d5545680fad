#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "locind/discovery.hpp"
#include "locind/events.hpp"
#include "locind/graph.hpp"
#include "locind/litest.hpp"

namespace locind {

using Json = nlohmann::ordered_json;

// Writes content to a temporary sibling and renames it over path.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// Shortest decimal with 17 significant digits (round-trips exactly).
std::string format_double(double value);

struct RawEvents {
    std::vector<double> times;
    std::vector<int> marks;
};

// CSV with header `time,mark`. Throws Parse on malformed input.
RawEvents parse_events_csv(const std::string& text);
RawEvents read_events_csv(const std::filesystem::path& path);
std::string events_to_csv(const MarkedEventSequence& seq);

// Moves each event that ties with (or precedes, after sorting) its
// predecessor to predecessor + epsilon. Applied before validation when the
// user opts in.
void separate_ties(RawEvents& raw, double epsilon);

struct EventSidecar {
    Window window;
    int dim = 0;
    std::vector<std::string> labels;
    // Original mark index of each stored mark when the data were restricted.
    std::vector<int> original_marks;
};

Json sidecar_to_json(const EventSidecar& sidecar);
EventSidecar sidecar_from_json(const Json& json);
// ev.csv -> ev.json
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

Json graph_to_json(const DirectedGraph& graph);
DirectedGraph graph_from_json(const Json& json);
std::string graph_to_dot(const DirectedGraph& graph, const std::vector<std::string>& labels = {});

Json config_to_json(const LITestConfig& config);
Json fit_to_json(const FittedIntensityModel& fit);
Json test_result_to_json(const LITestResult& result, const LITestConfig& config);
Json trace_to_json(const DiscoveryTrace& trace);

} // namespace locind
