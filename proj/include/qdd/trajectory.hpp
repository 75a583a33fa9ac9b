#pragma once

#include <cmath>
#include <vector>

#include "qdd/vec2.hpp"

namespace qdd {

enum class TrajectoryKind { Hold, Circle, Rectangle, PiecewiseLinear };

struct Waypoint {
  double time = 0.0;
  Vec2 position;
};

// Desired fingertip trajectory in the finger's local frame, sampled at the
// outer control rate.
struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::Hold;
  Vec2 hold_position{0.0, 0.06};
  // Circle
  Vec2 center{0.0, 0.06};
  double radius = 0.02;       // m
  double angular_rate = 1.0;  // rad/s
  // Rectangle: axis-aligned, traversed counterclockwise from the
  // bottom-left corner at constant speed.
  double width = 0.03;   // m
  double height = 0.02;  // m
  double speed = 0.02;   // m/s
  // PiecewiseLinear
  std::vector<Waypoint> waypoints;

  Vec2 sample(double t) const {
    switch (kind) {
      case TrajectoryKind::Hold:
        return hold_position;
      case TrajectoryKind::Circle:
        return {center.x + radius * std::cos(angular_rate * t),
                center.y + radius * std::sin(angular_rate * t)};
      case TrajectoryKind::Rectangle: {
        const double perim = 2.0 * (width + height);
        double s = std::fmod(speed * t, perim);
        if (s < 0.0) s += perim;
        const Vec2 bl{center.x - width / 2.0, center.y - height / 2.0};
        if (s < width) return {bl.x + s, bl.y};
        s -= width;
        if (s < height) return {bl.x + width, bl.y + s};
        s -= height;
        if (s < width) return {bl.x + width - s, bl.y + height};
        s -= width;
        return {bl.x, bl.y + height - s};
      }
      case TrajectoryKind::PiecewiseLinear: {
        if (waypoints.empty()) return hold_position;
        if (t <= waypoints.front().time) return waypoints.front().position;
        for (size_t i = 1; i < waypoints.size(); ++i) {
          if (t <= waypoints[i].time) {
            const Waypoint& a = waypoints[i - 1];
            const Waypoint& b = waypoints[i];
            const double span = b.time - a.time;
            const double u = span > 0.0 ? (t - a.time) / span : 1.0;
            return a.position + (b.position - a.position) * u;
          }
        }
        return waypoints.back().position;
      }
    }
    return hold_position;
  }
};

// Prescribed hand-base motion (world frame). DownUp sweeps the base down by
// `depth` and straight back up at constant speed without pausing. A negative
// depth sweeps upward first.
enum class BaseMotionKind { Fixed, DownUp };

struct BaseMotionSpec {
  BaseMotionKind kind = BaseMotionKind::Fixed;
  Vec2 home;            // base position at t = 0
  double depth = 0.05;  // m
  double speed = 0.5;   // m/s
  double start_time = 0.0;

  Vec2 position(double t) const {
    if (kind == BaseMotionKind::Fixed || depth == 0.0) return home;
    const double tau = t - start_time;
    const double sgn = depth > 0.0 ? 1.0 : -1.0;
    const double d = std::abs(depth);
    const double leg = d / speed;
    if (tau <= 0.0) return home;
    if (tau < leg) return {home.x, home.y - sgn * speed * tau};
    if (tau < 2.0 * leg) {
      return {home.x, home.y - sgn * (d - speed * (tau - leg))};
    }
    return home;
  }

  Vec2 velocity(double t) const {
    if (kind == BaseMotionKind::Fixed || depth == 0.0) return {0.0, 0.0};
    const double tau = t - start_time;
    const double sgn = depth > 0.0 ? 1.0 : -1.0;
    const double leg = std::abs(depth) / speed;
    if (tau <= 0.0 || tau >= 2.0 * leg) return {0.0, 0.0};
    return {0.0, sgn * (tau < leg ? -speed : speed)};
  }
};

}  // namespace qdd
