#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capillary/vec2.hpp"

namespace capillary {

/// Closed polygon: vertex n-1 connects back to vertex 0.
///
/// Construction validates n >= 3, nonzero segment lengths, and that the pinned
/// indices are in range and distinct. Pinned indices are kept sorted.
class DiscreteCurve {
public:
    explicit DiscreteCurve(std::vector<Vec2> vertices, std::vector<std::size_t> pinned = {});

    std::size_t size() const noexcept { return vertices_.size(); }
    const Vec2& operator[](std::size_t i) const noexcept { return vertices_[i]; }
    const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
    const std::vector<std::size_t>& pinned() const noexcept { return pinned_; }
    bool is_pinned(std::size_t i) const noexcept { return pin_mask_[i]; }

    std::size_t next(std::size_t i) const noexcept { return i + 1 == size() ? 0 : i + 1; }
    std::size_t prev(std::size_t i) const noexcept { return i == 0 ? size() - 1 : i - 1; }

    /// Same pins, new positions. Validates.
    DiscreteCurve with_vertices(std::vector<Vec2> vertices) const;
    DiscreteCurve with_pins(std::vector<std::size_t> pinned) const;

    /// Opposite traversal direction; pins follow their vertices.
    DiscreteCurve reversed() const;
    /// Cyclic relabel so that old vertex `k` becomes vertex 0.
    DiscreteCurve relabeled(std::size_t k) const;
    /// x -> scale * R(angle) x + shift.
    DiscreteCurve transformed(double scale, double angle = 0.0, Vec2 shift = {}) const;

private:
    std::vector<Vec2> vertices_;
    std::vector<std::size_t> pinned_;
    std::vector<bool> pin_mask_;
};

struct SegmentFrame {
    Vec2 midpoint;
    Vec2 tangent;
    Vec2 normal;
    double length = 0.0;
};

double curve_length(const DiscreteCurve& curve);
std::vector<SegmentFrame> segment_frames(const DiscreteCurve& curve);

/// Point-query tolerance: 1e-9 times the curve length.
double on_curve_tolerance(const DiscreteCurve& curve);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Winding number by summed signed turning angles. Throws OnCurveError when
/// `x` is within on_curve_tolerance of the curve.
int winding_number(const DiscreteCurve& curve, const Vec2& x);

/// Shoelace area, positive for counter-clockwise curves.
double signed_area(const DiscreteCurve& curve);

struct Intersection {
    std::size_t i = 0;
    std::size_t j = 0;
    Vec2 point;
    /// The curve passes through itself here (as opposed to touching or
    /// running along itself).
    bool transversal = false;
};

/// All intersections (transversal, touching, or overlapping) between
/// non-adjacent segments, i < j.
std::vector<Intersection> self_intersections(const DiscreteCurve& curve);

struct WindingReport {
    bool ok = true;
    bool embedded = true;
    /// Any sampled face had winding 1.
    bool has_interior = false;
    std::optional<Vec2> witness;
    int witness_winding = 0;
};

/// Checks that every face of the segment arrangement has winding 0 or 1.
/// `sample_budget` caps the number of winding evaluations for non-embedded
/// curves.
WindingReport check_winding_class(const DiscreteCurve& curve, std::size_t sample_budget = 1u << 20);

/// Measure of {x : winding = 1}. Throws WindingClassError on a class violation.
double enclosed_area(const DiscreteCurve& curve);

/// Minimum distance between non-adjacent segments; 0 iff the curve self-intersects.
double min_nonadjacent_separation(const DiscreteCurve& curve);

/// Discrete bi-Lipschitz constant over the unit arclength parametrization:
/// the minimum of |g(s) - g(t)| / d(s, t) over vertex pairs and the
/// closest-point pairs of non-adjacent segments.
double bilipschitz_constant(const DiscreteCurve& curve);

struct ResampleResult {
    DiscreteCurve curve;
    /// Old length minus new length (never negative up to roundoff).
    double length_deficit = 0.0;
    /// Largest distance from a dropped old vertex to the new polygon.
    double max_corner_deviation = 0.0;
};

/// Places `n_target` vertices on the old polyline so that each arc between
/// consecutive pinned vertices has equal chord lengths. Pinned vertices keep
/// their exact positions. Vertex 0 acts as the anchor when nothing is pinned.
ResampleResult resample_constant_speed(const DiscreteCurve& curve, std::size_t n_target);

/// Symmetric Hausdorff distance between the two polygon images, evaluated on
/// `subdivisions` points per segment.
double hausdorff_distance(const DiscreteCurve& a, const DiscreteCurve& b, std::size_t subdivisions = 16);

/// Axis-aligned bounding box diagonal.
double diameter(std::span<const Vec2> points);

// Curve files: one "x y" pair per line, optional "# pinned: i1 i2 ..." header.
DiscreteCurve read_curve(std::istream& in);
void write_curve(std::ostream& out, const DiscreteCurve& curve);
DiscreteCurve load_curve(const std::string& path);
void save_curve(const std::string& path, const DiscreteCurve& curve);

} // namespace capillary
