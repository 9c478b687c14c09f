#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "capillary/geometry.hpp"

namespace capillary {

enum class Regime { NonCollapsing, MobiusCritical, CollapsingPermissive };

std::string to_string(Regime r);

/// Parameters of G_delta = length + delta * G with the pair kernel
/// |t_i - t_j|^p / |m_i - m_j|^(1 + s p).
struct EnergyParams {
    double s = 0.6;
    double p = 2.0;
    double delta = 1e-3;
    /// Segment pairs with cyclic index distance <= this are skipped.
    std::size_t exclusion_width = 1;

    double sp() const { return s * p; }
    Regime regime() const;
    /// Throws ConfigError when 0 < s < 1, p >= 1, delta >= 0, w >= 1 fails.
    void validate() const;
};

struct EnergyBreakdown {
    double length_term = 0.0;
    double nonlocal_term = 0.0;
    double total = 0.0;
};

/// One ordered pair term |t_a - t_b|^p / |m_a - m_b|^(1+sp) * l_a * l_b.
double pair_term(const SegmentFrame& a, const SegmentFrame& b, double s, double p);

/// Discrete nonlocal energy G, summed over ordered segment pairs outside the
/// cyclic exclusion band. Throws CollapsedConfiguration if two non-excluded
/// midpoints coincide.
double nonlocal_energy(const DiscreteCurve& curve, const EnergyParams& params);

EnergyBreakdown total_energy(const DiscreteCurve& curve, const EnergyParams& params);

/// Exact gradient of total_energy with respect to every vertex.
std::vector<Vec2> energy_gradient(const DiscreteCurve& curve, const EnergyParams& params);

/// Energy and gradient in one pass.
EnergyBreakdown energy_and_gradient(const DiscreteCurve& curve, const EnergyParams& params,
                                    std::vector<Vec2>& gradient);

/// First integrand of the Ishizeki-Nagasawa decomposition of the Moebius
/// energy, |t_i - t_j|^2 / (2 |m_i - m_j|^2) l_i l_j, with the same
/// quadrature and exclusion band as nonlocal_energy.
double mobius_e1(const DiscreteCurve& curve, std::size_t exclusion_width = 1);

/// Interaction energy between two distinct polylines (open chains), summed
/// over segment a in `first`, segment b in `second`. No exclusion band.
double cross_energy(std::span<const Vec2> first, std::span<const Vec2> second, double s, double p);

struct RefinementRow {
    std::size_t n = 0;
    double value = 0.0;
    /// Local growth exponent from the last two successive differences (NaN
    /// for the first two rows).
    double exponent = 0.0;
};

struct RefinementTable {
    std::vector<RefinementRow> rows;
    /// Least-squares slope of log|E(n_k) - E(n_{k-1})| against log n_k.
    /// Positive: divergence like n^a; negative: convergence.
    double fitted_exponent = 0.0;
};

/// Growth exponent of a sequence of refinement values (same conventions as
/// RefinementTable).
RefinementTable fit_refinement(const std::vector<std::size_t>& levels, const std::vector<double>& values);

RefinementTable refinement_study(const std::function<DiscreteCurve(std::size_t)>& generator,
                                 const EnergyParams& params, const std::vector<std::size_t>& levels);

/// CSV rows "n,value,exponent_estimate".
void write_refinement_csv(std::ostream& out, const RefinementTable& table);

} // namespace capillary
