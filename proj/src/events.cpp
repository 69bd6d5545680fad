#include "locind/events.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "locind/error.hpp"

namespace locind {

MarkedEventSequence::MarkedEventSequence(int dim, Window window)
    : MarkedEventSequence(dim, window, {}, {})
{
}

MarkedEventSequence::MarkedEventSequence(int dim, Window window, std::vector<double> times,
                                         std::vector<int> marks)
    : dim_(dim), window_(window), times_(std::move(times)), marks_(std::move(marks)),
      by_mark_(static_cast<std::size_t>(std::max(dim, 0)))
{
    if (dim < 1)
        throw Error(Errc::InvalidArgument, "dimension must be at least 1");
    if (!std::isfinite(window.start) || !std::isfinite(window.end))
        throw Error(Errc::NonFiniteValue, "window bounds must be finite");
    if (!(window.start < window.end))
        throw Error(Errc::InvalidArgument, "window start must precede window end");
    for (std::size_t i = 0; i < times_.size(); ++i)
        by_mark_[static_cast<std::size_t>(marks_[i])].push_back(times_[i]);
}

std::span<const double> MarkedEventSequence::times_of(int mark) const
{
    if (mark < 0 || mark >= dim_)
        throw Error(Errc::MarkOutOfRange, "mark " + std::to_string(mark) + " not in [0, "
                                              + std::to_string(dim_) + ")");
    return by_mark_[static_cast<std::size_t>(mark)];
}

bool MarkedEventSequence::operator==(const MarkedEventSequence& other) const
{
    return dim_ == other.dim_ && window_ == other.window_ && times_ == other.times_
           && marks_ == other.marks_;
}

MarkedEventSequence validate_events(std::vector<double> times, std::vector<int> marks,
                                    Window window, int dim)
{
    if (times.size() != marks.size()) {
        std::ostringstream os;
        os << times.size() << " times but " << marks.size() << " marks";
        throw Error(Errc::LengthMismatch, os.str());
    }
    if (dim < 1)
        throw Error(Errc::InvalidArgument, "dimension must be at least 1");
    if (!std::isfinite(window.start) || !std::isfinite(window.end))
        throw Error(Errc::NonFiniteValue, "window bounds must be finite");
    if (!(window.start < window.end))
        throw Error(Errc::InvalidArgument, "window start must precede window end");

    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]))
            throw Error(Errc::NonFiniteValue, "event " + std::to_string(i) + " has a non-finite time");
        if (marks[i] < 0 || marks[i] >= dim)
            throw Error(Errc::MarkOutOfRange, "event " + std::to_string(i) + " has mark "
                                                  + std::to_string(marks[i]));
        if (!window.contains(times[i])) {
            std::ostringstream os;
            os.precision(17);
            os << "event " << i << " at t=" << times[i] << " outside [" << window.start << ", "
               << window.end << ")";
            throw Error(Errc::TimeOutsideWindow, os.str());
        }
    }

    if (!std::is_sorted(times.begin(), times.end())) {
        std::vector<std::size_t> order(times.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
        std::vector<double> sorted_times(times.size());
        std::vector<int> sorted_marks(marks.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            sorted_times[i] = times[order[i]];
            sorted_marks[i] = marks[order[i]];
        }
        times = std::move(sorted_times);
        marks = std::move(sorted_marks);
    }

    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] == times[i - 1]) {
            std::ostringstream os;
            os.precision(17);
            os << "two events at t=" << times[i] << " (marks " << marks[i - 1] << " and "
               << marks[i] << ")";
            throw Error(Errc::DuplicateTime, os.str());
        }
    }

    return MarkedEventSequence(dim, window, std::move(times), std::move(marks));
}

} // namespace locind
