#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace locind {

// Half-open observation window [start, end).
struct Window {
    double start = 0.0;
    double end = 0.0;

    double length() const { return end - start; }
    bool contains(double t) const { return t >= start && t < end; }
    bool operator==(const Window&) const = default;
};

/*!
 * A realization of a simple marked point process with marks in {0..d-1}.
 *
 * Times are strictly increasing across all marks and lie in the window.
 * Instances are only created through validate_events (or by the simulator,
 * which goes through the same checks), so the invariants always hold.
 */
class MarkedEventSequence {
  public:
    // Empty sequence on a window.
    MarkedEventSequence(int dim, Window window);

    int dim() const { return dim_; }
    const Window& window() const { return window_; }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }

    std::span<const double> times() const { return times_; }
    std::span<const int> marks() const { return marks_; }

    // Sorted event times of one mark.
    std::span<const double> times_of(int mark) const;
    std::size_t count(int mark) const { return times_of(mark).size(); }

    bool operator==(const MarkedEventSequence& other) const;

  private:
    friend MarkedEventSequence validate_events(std::vector<double>, std::vector<int>, Window,
                                               int);

    MarkedEventSequence(int dim, Window window, std::vector<double> times,
                        std::vector<int> marks);

    int dim_;
    Window window_;
    std::vector<double> times_;
    std::vector<int> marks_;
    std::vector<std::vector<double>> by_mark_;
};

// Validates raw event data and returns a time-sorted sequence. Throws Error
// with DuplicateTime, MarkOutOfRange, TimeOutsideWindow, NonFiniteValue or
// LengthMismatch.
MarkedEventSequence validate_events(std::vector<double> times, std::vector<int> marks,
                                    Window window, int dim);

} // namespace locind
