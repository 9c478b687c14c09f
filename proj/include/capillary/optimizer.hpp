#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "capillary/constraints.hpp"
#include "capillary/energy.hpp"
#include "capillary/geometry.hpp"

namespace capillary {

struct OptimizerConfig {
    std::size_t max_outer = 10;
    std::size_t max_inner = 2000;
    double step0 = 1e-2;
    double armijo_c = 1e-4;
    double shrink = 0.5;
    double grad_tol = 1e-3;
    std::size_t resample_every = 25;
    double penalty0 = 10.0;
    double penalty_growth = 10.0;
    std::uint64_t seed = 0;
    /// Reject steps that bring sheets closer than half the starting
    /// separation (only when delta > 0 and the start is embedded).
    bool keep_embedded = false;
    /// Length scale sigma of the H^1 metric (I - sigma^2 d^2/ds^2) used to
    /// smooth the search direction; 0 gives the plain gradient.
    double smoothing = 0.0;
    /// Caps each vertex displacement per trial at this fraction of its
    /// vertex_room; 0 disables the cap.
    double room_fraction = 0.5;
    /// Move vertices only along their vertex normals; the tangential part of
    /// the gradient is dropped (resampling handles the parametrization).
    bool normal_flow = true;

    void validate() const;
};

enum class OptimizeStatus { Converged, MaxIterations, InfeasibleStep };

std::string to_string(OptimizeStatus s);

struct HistoryEntry {
    std::size_t iteration = 0;
    double total = 0.0;
    double length = 0.0;
    double nonlocal = 0.0;
    double area_residual = 0.0;
    double pin_residual = 0.0;
    double min_separation = 0.0;
    /// Augmented-Lagrangian phase (index of the multiplier value in force).
    std::size_t phase = 0;
    double augmented = 0.0;
};

struct OptimizeResult {
    DiscreteCurve final;
    EnergyBreakdown breakdown;
    std::vector<HistoryEntry> history;
    OptimizeStatus status = OptimizeStatus::MaxIterations;
    std::size_t iterations = 0;
    double gradient_norm = 0.0;
    std::vector<std::string> warnings;
};

/// Augmented objective total + multiplier * r + penalty / 2 * r^2 with the
/// shoelace area residual r.
double augmented_objective(const DiscreteCurve& curve, const EnergyParams& params, const ConstraintSpec& spec,
                           double multiplier, double penalty);

/// Augmented gradient with pinned vertices zeroed and the component along the
/// (pin-restricted) area gradient removed. Uses the plain gradient, as with
/// normal_flow = false.
std::vector<Vec2> projected_gradient(const DiscreteCurve& curve, const EnergyParams& params,
                                     const ConstraintSpec& spec, double multiplier, double penalty);

/// Solves (I - sigma^2 D) d = g with D the arclength second difference on the
/// polygon and d = 0 at pinned vertices.
std::vector<Vec2> smooth_direction(const DiscreteCurve& curve, const std::vector<Vec2>& g, double sigma);

struct StepOutcome {
    DiscreteCurve curve;
    bool accepted = false;
    double step = 0.0;
    double objective = 0.0;
    /// sqrt(g . d) for gradient g and search direction d; |g| when unsmoothed.
    double gradient_norm = 0.0;
};

/// One Armijo trial: x - step * d, followed by area projection. Accepted when
/// the projected point is admissible and lowers the augmented objective by at
/// least armijo_c * step * g.d; otherwise the step shrinks.
StepOutcome descent_step(const DiscreteCurve& curve, const EnergyParams& params, const ConstraintSpec& spec,
                         double multiplier, double penalty, double step, const OptimizerConfig& cfg);

/// Minimizes G_delta over the discrete admissible class starting from a
/// feasible curve. When sp > 1, delta > 0 and the start is embedded, trials
/// that touch or cross themselves are rejected.
OptimizeResult minimize(const DiscreteCurve& curve0, const EnergyParams& params, const ConstraintSpec& spec,
                        const OptimizerConfig& cfg);

/// CSV "iter,total,length,nonlocal,area_res,pin_res,min_sep".
void write_history_csv(std::ostream& out, const std::vector<HistoryEntry>& history);

} // namespace capillary
