#pragma once

#include <cstddef>
#include <vector>

namespace clustab {

// Piecewise-constant default intensity curve. hazards[k] applies on
// (tenors[k-1], tenors[k]] and the last hazard extends flat to infinity, so
// the implied default density f(t) = lambda(t) * S(t) integrates to exactly 1.
struct HazardCurve {
    std::vector<double> tenors;   // strictly increasing, > 0, in years
    std::vector<double> hazards;  // one per tenor, > 0
    double recovery = 0.0;        // in [0, 1)

    void validate() const;

    double survival(double t) const;
    double density(double t) const;

    // Hazard on the interval containing t, treating interval starts as
    // inclusive; beyond the last tenor the final hazard applies.
    double hazard_at(double t) const;

    // First t with S(t) = s, for s in (0, 1].
    double time_to_survival(double s) const;
};

// Credit-triangle bootstrap: cumulative average hazard to tenor k is
// spread_k / (1 - R) with the spread in decimal, and interval hazards are
// backed out incrementally. An inverted spread curve can imply a non-positive
// interval hazard; by default that raises an error naming the tenor, with
// floor_inverted the hazard is floored at 1e-6 instead.
HazardCurve spreads_to_hazard(const std::vector<double>& spreads_bp,
                              const std::vector<double>& tenors, double recovery,
                              bool floor_inverted = false);

// Angle between the square-root default densities: phi = arccos of the
// Bhattacharyya coefficient of f_a, f_b, integrated in closed form over the
// merged tenor grid. Returns phi in [0, pi/2].
double term_structure_distance(const HazardCurve& a, const HazardCurve& b);

}  // namespace clustab
