#pragma once

// Independent reference implementations used to cross-check the library:
// finite-difference kinematics/dynamics, a combinatorial positive-spanning
// test for grasp wrenches, and shared RNG helpers.

#include <array>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "qdd/contact.hpp"
#include "qdd/dynamics.hpp"
#include "qdd/transmission.hpp"
#include "qdd/vec2.hpp"

namespace oracles {

inline std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

// Directory containing the test sources/data, exported by CTest.
inline std::string source_dir() {
  const char* d = std::getenv("QDD_SOURCE_DIR");
  return d ? std::string(d) : std::string(".");
}

// --- Finite-difference kinematics --------------------------------------------

inline qdd::Mat2 fd_jacobian(qdd::Vec2 theta, const qdd::FingerGeometry& geom,
                             double h = 1e-6) {
  const auto fk = [&](qdd::Vec2 t) { return qdd::forward_kinematics(t, geom); };
  const qdd::Vec2 dx = (fk({theta.x + h, theta.y}) - fk({theta.x - h, theta.y})) /
                       (2.0 * h);
  const qdd::Vec2 dy = (fk({theta.x, theta.y + h}) - fk({theta.x, theta.y - h})) /
                       (2.0 * h);
  return {dx.x, dy.x, dx.y, dy.y};
}

inline qdd::Mat2 fd_point_jacobian(qdd::Vec2 theta,
                                   const qdd::FingerGeometry& geom, int link,
                                   double s, double h = 1e-6) {
  const auto fk = [&](qdd::Vec2 t) { return qdd::link_point(t, geom, link, s); };
  const qdd::Vec2 dx = (fk({theta.x + h, theta.y}) - fk({theta.x - h, theta.y})) /
                       (2.0 * h);
  const qdd::Vec2 dy = (fk({theta.x, theta.y + h}) - fk({theta.x, theta.y - h})) /
                       (2.0 * h);
  return {dx.x, dy.x, dx.y, dy.y};
}

inline double max_abs_diff(qdd::Mat2 a, qdd::Mat2 b) {
  return std::max({std::abs(a.a11 - b.a11), std::abs(a.a12 - b.a12),
                   std::abs(a.a21 - b.a21), std::abs(a.a22 - b.a22)});
}

inline double mat_norm(qdd::Mat2 a) {
  return std::max({std::abs(a.a11), std::abs(a.a12), std::abs(a.a21),
                   std::abs(a.a22)});
}

// Coriolis vector from finite differences of the mass matrix (Christoffel
// symbols), independent of the closed-form expression:
//   c_k = sum_ij (dM_ki/dtheta_j - 0.5 dM_ij/dtheta_k) v_i v_j
inline qdd::Vec2 fd_coriolis(const qdd::FingerPlant& plant, qdd::Vec2 theta,
                             qdd::Vec2 v, double h = 1e-6) {
  const auto M = [&](qdd::Vec2 t) { return plant.mass_matrix(t); };
  std::array<qdd::Mat2, 2> dM;  // dM[j] = dM/dtheta_j
  dM[0] = (M({theta.x + h, theta.y}) * 1.0);
  {
    const qdd::Mat2 m2 = M({theta.x - h, theta.y});
    dM[0] = {(dM[0].a11 - m2.a11) / (2 * h), (dM[0].a12 - m2.a12) / (2 * h),
             (dM[0].a21 - m2.a21) / (2 * h), (dM[0].a22 - m2.a22) / (2 * h)};
  }
  dM[1] = M({theta.x, theta.y + h});
  {
    const qdd::Mat2 m2 = M({theta.x, theta.y - h});
    dM[1] = {(dM[1].a11 - m2.a11) / (2 * h), (dM[1].a12 - m2.a12) / (2 * h),
             (dM[1].a21 - m2.a21) / (2 * h), (dM[1].a22 - m2.a22) / (2 * h)};
  }
  const auto Mij = [](qdd::Mat2 m, int i, int j) {
    return i == 0 ? (j == 0 ? m.a11 : m.a12) : (j == 0 ? m.a21 : m.a22);
  };
  const double vv[2] = {v.x, v.y};
  double c[2] = {0.0, 0.0};
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        c[k] += (Mij(dM[j], k, i) - 0.5 * Mij(dM[k], i, j)) * vv[i] * vv[j];
      }
    }
  }
  return {c[0], c[1]};
}

// --- Positive-spanning oracle for planar grasp wrenches ----------------------
//
// A set of wrenches w_i in R^3 positively spans R^3 iff no closed half-space
// contains all of them, i.e. there is no u != 0 with dot(w_i, u) <= 0 for all
// i. For finitely many vectors it suffices to test u = +-(w_i x w_j) over all
// pairs (the extreme rays of the polar cone lie on such normals).

struct Wrench3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Wrench3 cross3(const Wrench3& a, const Wrench3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
          a.x * b.y - a.y * b.x};
}
inline double dot3(const Wrench3& a, const Wrench3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double norm3(const Wrench3& a) { return std::sqrt(dot3(a, a)); }

inline bool positively_spans_r3(const std::vector<Wrench3>& w,
                                double tol = 1e-9) {
  if (w.size() < 4) return false;
  for (size_t i = 0; i < w.size(); ++i) {
    for (size_t j = i + 1; j < w.size(); ++j) {
      const Wrench3 n = cross3(w[i], w[j]);
      if (norm3(n) < tol) continue;
      for (double sign : {1.0, -1.0}) {
        bool separating = true;
        for (const Wrench3& wk : w) {
          if (sign * dot3(n, wk) > tol * norm3(wk)) {
            separating = false;
            break;
          }
        }
        if (separating) return false;
      }
    }
  }
  // Also reject rank-deficient sets (all wrenches in one plane through 0).
  // Covered above when some pair spans that plane; a fully collinear set has
  // every cross product ~0 and would slip through, so check directly.
  bool any_pair = false;
  for (size_t i = 0; i < w.size() && !any_pair; ++i) {
    for (size_t j = i + 1; j < w.size(); ++j) {
      if (norm3(cross3(w[i], w[j])) >= tol) {
        any_pair = true;
        break;
      }
    }
  }
  return any_pair;
}

// Friction-cone edge wrenches of a planar contact set.
inline std::vector<Wrench3> cone_edge_wrenches(const qdd::ContactSet& cs) {
  std::vector<Wrench3> w;
  for (const qdd::ContactPoint& c : cs) {
    const auto [e1, e2] = qdd::friction_cone_edges(c);
    for (const qdd::Vec2& e : {e1, e2}) {
      w.push_back({e.x, e.y, qdd::cross(c.position, e)});
    }
  }
  return w;
}

// Brute-force force-closure verdict for a planar frictional grasp.
inline bool brute_force_closure(const qdd::ContactSet& cs) {
  return positively_spans_r3(cone_edge_wrenches(cs));
}

}  // namespace oracles
