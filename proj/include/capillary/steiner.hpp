#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "capillary/geometry.hpp"

namespace capillary {

/// Vertices are numbered terminals first, then Steiner points.
struct SteinerTree {
    std::vector<Vec2> terminals;
    std::vector<Vec2> steiner_points;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    double total_length = 0.0;

    std::size_t vertex_count() const { return terminals.size() + steiner_points.size(); }
    Vec2 vertex(std::size_t k) const;
    std::vector<std::vector<std::size_t>> adjacency() const;
};

/// Minimal Steiner tree of 2 to 4 distinct terminals, by enumeration of all
/// full and degenerate topologies. Throws InvalidCurve on bad input.
SteinerTree steiner_tree(std::span<const Vec2> terminals);

/// Point minimizing the summed distance to a, b, c (the vertex itself when
/// its angle is at least 120 degrees).
Vec2 fermat_point(const Vec2& a, const Vec2& b, const Vec2& c);

/// Geometric median of a point set by Weiszfeld iteration, escaping from
/// data points that are not optimal.
Vec2 geometric_median(std::span<const Vec2> points, const Vec2& start, double tol = 1e-12);

double minimum_spanning_tree_length(std::span<const Vec2> points);

/// Largest deviation from 2*pi/3 among angles between consecutive edges at
/// the Steiner points (0 when there are none).
double max_steiner_angle_error(const SteinerTree& tree);

/// Closed depth-first tour around the tree (children in counter-clockwise
/// order), each traversal split into equal pieces so that the whole curve
/// has n near-uniform segments; every tree-vertex visit is pinned.
DiscreteCurve double_cover_curve(const SteinerTree& tree, std::size_t n);

struct MultiplicityReport {
    bool ok = true;
    std::size_t samples = 0;
    std::size_t odd = 0;
    /// counts[k] = number of samples with k sheets through them.
    std::vector<std::size_t> counts;
};

/// Draws `samples` points on the image (away from vertices and crossings)
/// and counts the segments passing through each.
MultiplicityReport verify_even_multiplicity(const DiscreteCurve& curve, std::size_t samples, std::uint64_t seed = 0);

/// Lines "T x y", "S x y", "E i j", "L total".
void write_tree(std::ostream& out, const SteinerTree& tree);
SteinerTree read_tree(std::istream& in);

} // namespace capillary
