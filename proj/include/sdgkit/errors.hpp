#pragma once

#include <stdexcept>
#include <string>

namespace sdgkit {

// Base class so callers can catch everything from this library in one place.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite coordinates, coincident points, malformed arguments.
class invalid_input : public error {
public:
    using error::error;
};

// Three collinear points where a proper triangle is required.
class degenerate_triangle : public error {
public:
    using error::error;
};

// Point set that admits no triangulation (all points on one line, or n < 3).
class degenerate_input : public error {
public:
    using error::error;
};

// Exact tie that the algorithms are not defined on: cocircular quadruple,
// direction parallel to a polygon chord, tied argmin, and the like.
class general_position_violation : public error {
public:
    using error::error;
};

// Queried pair is not an edge of the triangulation at hand.
class not_an_edge : public error {
public:
    using error::error;
};

// Convex body fails a closeness requirement (e.g. sticks out of the unit disk).
class not_close : public error {
public:
    using error::error;
};

// Vertex list is not strictly convex / counterclockwise / around the origin.
class invalid_body : public error {
public:
    using error::error;
};

// A check was invoked on a configuration where its premise does not hold.
class precondition_failed : public error {
public:
    using error::error;
};

// A structural self-check failed; indicates a bug, not bad input.
class internal_inconsistency : public error {
public:
    using error::error;
};

// Trajectory family outside the generic cases the simulator handles
// (identically cocircular quadruple, simultaneous interacting events).
class degenerate_motion : public error {
public:
    using error::error;
};

// Time outside a trajectory's validity interval.
class out_of_range : public error {
public:
    using error::error;
};

// Simulation exceeded its configured event budget.
class budget_exceeded : public error {
public:
    using error::error;
};

// Render request names no layers or an unknown layer.
class invalid_spec : public error {
public:
    using error::error;
};

// Input document could not be parsed; carries a human-readable location.
class parse_error : public error {
public:
    parse_error(const std::string& what, int line, int column)
        : error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column) {}
    explicit parse_error(const std::string& what) : error(what), line_(0), column_(0) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

} // namespace sdgkit
