#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "qdd/lp.hpp"
#include "qdd/vec2.hpp"

namespace qdd {

struct Disk {
  double radius = 0.02;
};

// Counterclockwise convex polygon in body frame.
struct ConvexPolygon {
  std::vector<Vec2> vertices;
};

struct RigidObject {
  std::variant<Disk, ConvexPolygon> shape;
  double mass = 0.1;       // kg
  double inertia = 2e-5;   // kg*m^2
  Vec2 position;           // m, world
  double orientation = 0.0;  // rad
  Vec2 velocity;           // m/s
  double angular_velocity = 0.0;  // rad/s
  bool kinematic = false;  // immovable (scale, fixture)

  bool is_disk() const { return std::holds_alternative<Disk>(shape); }
};

// Point contact on the object boundary. `normal` is the inward unit normal
// (pointing into the object), `penetration` the overlap depth.
struct ContactPoint {
  Vec2 position;
  Vec2 normal;
  double mu = 0.5;
  double penetration = 0.0;
  // Which collision primitive produced this contact (set by detection).
  int finger = -1;  // 0/1, -1 for palm
  int link = 0;     // 1, 2, 3 = fingertip, 0 = palm
};

using ContactSet = std::vector<ContactPoint>;

struct PlanarWrench {
  double fx = 0.0;
  double fy = 0.0;
  double tz = 0.0;
};

// --- Friction cone ----------------------------------------------------------

inline std::pair<Vec2, Vec2> friction_cone_edges(const ContactPoint& c) {
  if (c.mu < 0.0) throw std::invalid_argument("friction coefficient < 0");
  const double half_angle = std::atan(c.mu);
  return {rotate(c.normal, half_angle), rotate(c.normal, -half_angle)};
}

// --- Penalty contact force ---------------------------------------------------

struct PenaltyParams {
  double kn = 2000.0;    // N/m
  double dn = 10.0;      // N*s/m
  double k_visc = 100.0; // N*s/m, stiction regularization
};

// Force applied to the object at the contact. `rel_velocity` is the velocity
// of the object material point minus that of the finger/palm point. The
// tangential component never exceeds mu * f_n.
inline Vec2 contact_force(const ContactPoint& c, Vec2 rel_velocity,
                          const PenaltyParams& pen) {
  if (c.penetration <= 0.0) return {0.0, 0.0};
  const double v_n = dot(rel_velocity, c.normal);
  const double f_n = std::max(0.0, pen.kn * c.penetration - pen.dn * v_n);
  const Vec2 tangent = c.normal.perp();
  const double v_t = dot(rel_velocity, tangent);
  const double f_t_mag = std::min(c.mu * f_n, pen.k_visc * std::abs(v_t));
  const double f_t = v_t > 0.0 ? -f_t_mag : (v_t < 0.0 ? f_t_mag : 0.0);
  return c.normal * f_n + tangent * f_t;
}

// --- Collision primitives ----------------------------------------------------

// Circle (fingertip, link capsule cross-section) or bare segment (palm).
struct CollisionCircle {
  Vec2 center;
  double radius;
  Vec2 velocity;  // velocity of the center in world frame
};

struct CollisionSegment {
  Vec2 a;
  Vec2 b;
  double radius = 0.0;  // capsule radius; 0 for a bare segment
  Vec2 velocity;        // rigid translation velocity (palm)
};

inline Vec2 closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squared_norm();
  if (len2 <= 0.0) return a;
  double t = dot(p - a, ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return a + ab * t;
}

// Closest boundary point and inward normal of the object at a world point
// outside or near its boundary. Returns signed distance (negative inside).
struct SurfaceQuery {
  double distance = 0.0;  // point to boundary, negative if inside
  Vec2 normal;            // inward unit normal at the closest boundary point
  Vec2 boundary_point;
};

inline SurfaceQuery query_surface(const RigidObject& obj, Vec2 p) {
  SurfaceQuery q;
  if (const Disk* d = std::get_if<Disk>(&obj.shape)) {
    const Vec2 r = p - obj.position;
    const double dist = r.norm();
    const Vec2 outward = dist > 1e-12 ? r / dist : Vec2{1.0, 0.0};
    q.distance = dist - d->radius;
    q.normal = -outward;
    q.boundary_point = obj.position + outward * d->radius;
    return q;
  }
  const ConvexPolygon& poly = std::get<ConvexPolygon>(obj.shape);
  // Work in world frame.
  std::vector<Vec2> verts(poly.vertices.size());
  for (size_t i = 0; i < verts.size(); ++i) {
    verts[i] = obj.position + rotate(poly.vertices[i], obj.orientation);
  }
  bool inside = true;
  double max_plane = -1e300;
  Vec2 best_normal;
  Vec2 best_point;
  double best_dist = 1e300;
  for (size_t i = 0; i < verts.size(); ++i) {
    const Vec2 a = verts[i];
    const Vec2 b = verts[(i + 1) % verts.size()];
    const Vec2 edge = b - a;
    const Vec2 outward = Vec2{edge.y, -edge.x}.normalized();  // CCW polygon
    const double plane = dot(p - a, outward);
    if (plane > 0.0) inside = false;
    const Vec2 cp = closest_point_on_segment(p, a, b);
    const double d = (p - cp).norm();
    if (d < best_dist) {
      best_dist = d;
      best_point = cp;
    }
    if (plane > max_plane) {
      max_plane = plane;
      best_normal = -outward;
    }
  }
  if (inside) {
    q.distance = max_plane;  // negative: depth to nearest face
    // Recompute the face normal of the least-deep face for the inside case.
    q.normal = best_normal;
    q.boundary_point = p + best_normal * max_plane;
  } else {
    q.distance = best_dist;
    q.normal = (best_point - p).normalized();
    q.boundary_point = best_point;
  }
  return q;
}

inline std::optional<ContactPoint> circle_vs_object(const CollisionCircle& c,
                                                    const RigidObject& obj,
                                                    double mu) {
  const SurfaceQuery q = query_surface(obj, c.center);
  const double pen = c.radius - q.distance;
  if (pen <= 0.0) return std::nullopt;
  ContactPoint cp;
  cp.position = q.boundary_point;
  cp.normal = q.normal;
  cp.mu = mu;
  cp.penetration = pen;
  return cp;
}

// Capsule/segment vs object: sample the closest point of the segment to the
// object and run the circle test there.
inline std::optional<ContactPoint> segment_vs_object(const CollisionSegment& s,
                                                     const RigidObject& obj,
                                                     double mu) {
  // Closest point of the segment to the object center works for disks; for
  // polygons, scan a few samples and keep the deepest.
  Vec2 best_center = closest_point_on_segment(obj.position, s.a, s.b);
  if (!obj.is_disk()) {
    double best_pen = -1e300;
    const int samples = 16;
    for (int i = 0; i <= samples; ++i) {
      const Vec2 p = s.a + (s.b - s.a) * (static_cast<double>(i) / samples);
      const SurfaceQuery q = query_surface(obj, p);
      const double pen = s.radius - q.distance;
      if (pen > best_pen) {
        best_pen = pen;
        best_center = p;
      }
    }
  }
  CollisionCircle c{best_center, s.radius, s.velocity};
  return circle_vs_object(c, obj, mu);
}

// --- Closure tests -----------------------------------------------------------

// Planar antipodal force closure for two frictional contacts: the line
// through the contact points must lie strictly inside both friction cones.
inline bool force_closure_2contact(const ContactPoint& c1,
                                   const ContactPoint& c2) {
  if (c1.mu < 0.0 || c2.mu < 0.0) {
    throw std::invalid_argument("friction coefficient < 0");
  }
  const Vec2 line = c2.position - c1.position;
  const double len = line.norm();
  if (len <= 0.0) return false;
  const Vec2 u = line / len;
  const double cos1 = dot(u, c1.normal);
  const double cos2 = dot(-u, c2.normal);
  const double lim1 = 1.0 / std::sqrt(1.0 + c1.mu * c1.mu);
  const double lim2 = 1.0 / std::sqrt(1.0 + c2.mu * c2.mu);
  return cos1 > lim1 && cos2 > lim2;
}

struct FormClosureResult {
  bool closure = false;
  std::vector<double> lambda;  // certificate: sum lambda_i w_i = 0, lambda >= 1
};

// First-order planar form closure: the frictionless unit contact wrenches
// w_i = (n_i, p_i x n_i) must positively span R^3.
inline FormClosureResult form_closure(const ContactSet& contacts) {
  FormClosureResult res;
  if (contacts.size() < 4) return res;  // planar bodies need >= 4 contacts

  std::vector<std::vector<double>> W(3,
                                     std::vector<double>(contacts.size()));
  for (size_t i = 0; i < contacts.size(); ++i) {
    const Vec2 n = contacts[i].normal;
    W[0][i] = n.x;
    W[1][i] = n.y;
    W[2][i] = cross(contacts[i].position, n);
  }
  if (matrix_rank(W) < 3) return res;

  // lambda_i >= 1 with W lambda = 0  <=>  s >= 0 with W s = -W 1.
  std::vector<double> b(3, 0.0);
  for (size_t i = 0; i < contacts.size(); ++i) {
    b[0] -= W[0][i];
    b[1] -= W[1][i];
    b[2] -= W[2][i];
  }
  const auto lp = FeasibilityLP::solve(W, b);
  if (!lp.feasible) return res;
  res.closure = true;
  res.lambda.resize(contacts.size());
  for (size_t i = 0; i < contacts.size(); ++i) res.lambda[i] = 1.0 + lp.x[i];
  return res;
}

}  // namespace qdd
