#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "capillary/constraints.hpp"
#include "capillary/energy.hpp"
#include "capillary/geometry.hpp"
#include "capillary/optimizer.hpp"

namespace capillary {

struct SweepRecord {
    double control = 0.0;
    double length = 0.0;
    double nonlocal = 0.0;
    double min_separation = 0.0;
    double area_residual = 0.0;
    std::size_t iterations = 0;
    double reference = 0.0;
    /// Optimizer status of the last run, or the error text of a failed one.
    std::string status;
    std::optional<DiscreteCurve> curve;
};

/// 1e-1, 1e-2, ... down to `target` (which is always the last entry).
std::vector<double> decade_chain(double target);

/// Warm-started minimization over decreasing deltas, followed by one delta = 0
/// run whose length becomes every record's reference.
std::vector<SweepRecord> sweep_delta(const ConstraintSpec& spec, const EnergyParams& params0,
                                     const std::vector<double>& deltas, const OptimizerConfig& cfg, std::size_t n,
                                     const DiscreteCurve* start = nullptr);

/// Lowers the enclosed area of an admissible curve to spec.epsilon in stages,
/// each moving vertices along room-weighted normals and then relaxing briefly.
DiscreteCurve shrink_area(const DiscreteCurve& curve, const ConstraintSpec& spec, const EnergyParams& params,
                          const OptimizerConfig& cfg);

/// For each epsilon (decreasing): shrink the previous minimizer's area, then
/// minimize along decade_chain(params.delta). Reference: twice the Steiner
/// tree length of the pins.
std::vector<SweepRecord> sweep_epsilon(const ConstraintSpec& spec, const std::vector<double>& epsilons,
                                       const EnergyParams& params, const OptimizerConfig& cfg, std::size_t n);

struct RecoveryResult {
    DiscreteCurve curve;
    double lambda = 0.0;
    Vec2 center;
    /// sqrt(epsilon / pi).
    double radius = 0.0;
    /// The attached polygon is inscribed in the circle and then stretched by
    /// this factor across the axis through the base point, so that its
    /// perimeter is exactly 2 sqrt(pi epsilon) while no point gets farther
    /// than 2 radius from the base.
    double stretch = 1.0;
    std::size_t circle_vertices = 0;
};

/// Smallest number of polygon vertices used for the attached circle.
inline constexpr std::size_t kMinCircleVertices = 128;

/// Attaches a circle of area epsilon at vertex 0 of a zero-area curve: the
/// circle takes max(round(lambda n), kMinCircleVertices) vertices with
/// lambda = epsilon^(1/4), the original curve (resampled) the rest.
RecoveryResult recovery_sequence(const DiscreteCurve& curve, double epsilon, std::size_t n);

enum class ContactGeometry {
    /// Segment (y, -1), |y| < 0.1, against the unit circle arc around (0, -1).
    Tangential,
    /// Two segments of half-length 0.1 crossing at 60 degrees at the origin.
    Crossing,
};

struct CounterexampleRow {
    double s = 0.0;
    double p = 0.0;
    /// Segments per curve.
    std::size_t level = 0;
    double value = 0.0;
    /// Local growth exponent (see RefinementRow).
    double exponent = 0.0;
};

struct CounterexampleTable {
    std::vector<CounterexampleRow> rows;
    /// One fitted exponent per s value, in input order.
    std::vector<double> fitted;
};

std::vector<Vec2> contact_polyline(ContactGeometry geometry, bool first, std::size_t level);

CounterexampleTable counterexample_study(const std::vector<double>& s_values, double p,
                                         const std::vector<std::size_t>& levels,
                                         ContactGeometry geometry = ContactGeometry::Tangential);

/// CSV "control,length,nonlocal,min_sep,area_res,iters,reference".
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);
/// CSV "s,p,level,value,exponent".
void write_counterexample_csv(std::ostream& out, const CounterexampleTable& table);

/// Writes sweep.csv and one curve_NNN.svg and curve_NNN.txt per record that
/// carries a curve. Throws IoError when the directory cannot be written.
void emit_report(const std::vector<SweepRecord>& records, const std::filesystem::path& out_dir,
                 const std::vector<Vec2>& pins = {});

} // namespace capillary
