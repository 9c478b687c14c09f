#pragma once

#include <string>
#include <vector>

#include "capillary/geometry.hpp"

namespace capillary {

/// Admissibility data: pins the curve must pass through, the enclosed area
/// target, and tolerances (tol_area is relative to epsilon).
struct ConstraintSpec {
    std::vector<Vec2> pins;
    double epsilon = 0.0;
    double tol_pin = 1e-9;
    double tol_area = 1e-8;

    /// Distinct pins, epsilon > 0, tolerances in (0, 1e-2]. At least
    /// `min_pins` pins.
    void validate(std::size_t min_pins = 2) const;
};

/// Anchors every pin at a curve vertex: the nearest vertex is reused when the
/// nearest curve point lies within a quarter segment of it, otherwise that
/// segment is split. The anchored vertices are marked pinned.
DiscreteCurve attach_pins(const DiscreteCurve& curve, const ConstraintSpec& spec);

/// Max over pins of the distance to the nearest pinned vertex (or to the
/// polygon when nothing is pinned).
double pin_residual(const DiscreteCurve& curve, const ConstraintSpec& spec);

/// enclosed_area(curve) - epsilon.
double area_residual(const DiscreteCurve& curve, const ConstraintSpec& spec);

/// Gradient of the shoelace area with respect to each vertex.
std::vector<Vec2> area_gradient(const DiscreteCurve& curve);

/// Unit vertex normals: normalized sum of the two adjacent segment normals,
/// zero at pinned vertices and at cusps.
std::vector<Vec2> vertex_normals(const DiscreteCurve& curve);

struct AreaProjection {
    DiscreteCurve curve;
    /// Common offset applied along the vertex normals.
    double offset = 0.0;
};

/// Moves every unpinned vertex by a common offset t along its vertex normal,
/// t being the smaller-magnitude root of the (quadratic) area equation.
/// Throws ProjectionOutOfRange when there is no root, no movable vertex, or
/// |t| exceeds a tenth of the diameter.
AreaProjection project_area_with_offset(const DiscreteCurve& curve, const ConstraintSpec& spec);
DiscreteCurve project_area(const DiscreteCurve& curve, const ConstraintSpec& spec);

/// Same quadratic solve along an arbitrary per-vertex direction field
/// (entries at pinned vertices are ignored).
AreaProjection project_area_along(const DiscreteCurve& curve, const ConstraintSpec& spec,
                                  const std::vector<Vec2>& directions);

/// Local room of each vertex: distance to the nearest segment not incident to
/// it, where each such distance is also charged to that segment's endpoints.
std::vector<double> vertex_room(const DiscreteCurve& curve);

/// Vertex normals scaled by vertex_room relative to the largest room;
/// vertices in near-contact get zero.
/// An offset t along this field moves no vertex by more than |t| times its
/// room over the largest room.
std::vector<Vec2> room_weighted_normals(const DiscreteCurve& curve);

/// Feasible starting curve: a thin strip along the polyline through the pins
/// (angular order about their centroid, or along the line when collinear),
/// pinned, resampled to `n` vertices, and projected to area epsilon.
/// Non-fatal adjustments are appended to `warnings` when given.
DiscreteCurve initial_curve(const ConstraintSpec& spec, std::size_t n, std::vector<std::string>* warnings = nullptr);

} // namespace capillary
