#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace stagpoint {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline Vec2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator+(Point2 a, Vec2 v) { return {a.x + v.x, a.y + v.y}; }

// Axis-aligned rectangle.
struct Box {
    double xmin = 0.0;
    double xmax = 0.0;
    double ymin = 0.0;
    double ymax = 0.0;

    bool contains(Point2 p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
    double distance_to_boundary(Point2 p) const {
        return std::fmin(std::fmin(p.x - xmin, xmax - p.x), std::fmin(p.y - ymin, ymax - p.y));
    }
    bool contains_disk(Point2 c, double r) const { return distance_to_boundary(c) >= r; }
};

// Error taxonomy shared by every module.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct InvalidSpec : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateDenominator : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WindowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace stagpoint
