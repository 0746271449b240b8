#include "clustab/hazard.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "clustab/error.hpp"

namespace clustab {

void HazardCurve::validate() const {
    if (tenors.empty() || tenors.size() != hazards.size()) {
        throw Error("distances", "hazard curve needs matching non-empty tenors and hazards");
    }
    double prev = 0.0;
    for (std::size_t k = 0; k < tenors.size(); ++k) {
        if (!std::isfinite(tenors[k]) || tenors[k] <= prev) {
            throw Error("distances", "hazard tenors must be strictly increasing and positive");
        }
        if (!std::isfinite(hazards[k]) || hazards[k] <= 0.0) {
            throw Error("distances", "hazard rates must be strictly positive");
        }
        prev = tenors[k];
    }
    if (!std::isfinite(recovery) || recovery < 0.0 || recovery >= 1.0) {
        throw Error("distances", "recovery must lie in [0, 1)");
    }
}

double HazardCurve::hazard_at(double t) const {
    for (std::size_t k = 0; k < tenors.size(); ++k) {
        if (t < tenors[k]) return hazards[k];
    }
    return hazards.back();
}

double HazardCurve::survival(double t) const {
    if (t <= 0.0) return 1.0;
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t k = 0; k < tenors.size(); ++k) {
        const double hi = std::min(t, tenors[k]);
        if (hi > prev) acc += hazards[k] * (hi - prev);
        if (t <= tenors[k]) return std::exp(-acc);
        prev = tenors[k];
    }
    acc += hazards.back() * (t - prev);
    return std::exp(-acc);
}

double HazardCurve::density(double t) const {
    if (t < 0.0) return 0.0;
    return hazard_at(t) * survival(t);
}

double HazardCurve::time_to_survival(double s) const {
    if (!(s > 0.0) || s > 1.0) {
        throw Error("distances", "time_to_survival needs s in (0, 1]");
    }
    const double target = -std::log(s);
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t k = 0; k < tenors.size(); ++k) {
        const double step = hazards[k] * (tenors[k] - prev);
        if (acc + step >= target) return prev + (target - acc) / hazards[k];
        acc += step;
        prev = tenors[k];
    }
    return prev + (target - acc) / hazards.back();
}

HazardCurve spreads_to_hazard(const std::vector<double>& spreads_bp,
                              const std::vector<double>& tenors, double recovery,
                              bool floor_inverted) {
    if (spreads_bp.empty() || spreads_bp.size() != tenors.size()) {
        throw Error("distances", "spreads and tenors must be non-empty and the same length");
    }
    if (!std::isfinite(recovery) || recovery < 0.0 || recovery >= 1.0) {
        throw Error("distances", "recovery must lie in [0, 1)");
    }
    HazardCurve curve;
    curve.tenors = tenors;
    curve.recovery = recovery;
    curve.hazards.reserve(tenors.size());
    double prev_tenor = 0.0;
    double prev_cum = 0.0;  // Lambda_{k-1} * tau_{k-1}
    double prev_avg = 0.0;  // Lambda_{k-1}
    for (std::size_t k = 0; k < tenors.size(); ++k) {
        if (!std::isfinite(tenors[k]) || tenors[k] <= prev_tenor) {
            throw Error("distances", "hazard tenors must be strictly increasing and positive");
        }
        if (!std::isfinite(spreads_bp[k]) || spreads_bp[k] <= 0.0) {
            throw Error("distances", "spreads must be strictly positive");
        }
        const double avg_hazard = spreads_bp[k] / 10000.0 / (1.0 - recovery);
        const double cum = avg_hazard * tenors[k];
        // When the quoted average hazard has not moved, the forward hazard is
        // that average; short-circuiting keeps flat curves exactly flat.
        double lambda = (k > 0 && avg_hazard == prev_avg)
                            ? avg_hazard
                            : (cum - prev_cum) / (tenors[k] - prev_tenor);
        if (lambda <= 0.0) {
            if (!floor_inverted) {
                throw Error("distances", "inverted spread curve: non-positive hazard at tenor " +
                                             std::to_string(tenors[k]));
            }
            lambda = 1e-6;
        }
        curve.hazards.push_back(lambda);
        prev_tenor = tenors[k];
        prev_cum = cum;  // recurrence uses the quoted cumulative, floored or not
        prev_avg = avg_hazard;
    }
    curve.validate();
    return curve;
}

double term_structure_distance(const HazardCurve& a, const HazardCurve& b) {
    a.validate();
    b.validate();

    // Merged grid on which both hazards are constant per interval.
    std::vector<double> grid;
    grid.reserve(a.tenors.size() + b.tenors.size() + 1);
    grid.push_back(0.0);
    grid.insert(grid.end(), a.tenors.begin(), a.tenors.end());
    grid.insert(grid.end(), b.tenors.begin(), b.tenors.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    // On [t0, t1) with constant hazards la, lb:
    //   integral of sqrt(f_a f_b) = sqrt(la lb Sa(t0) Sb(t0)) * 2/(la+lb)
    //                               * (1 - exp(-(la+lb)(t1-t0)/2)),
    // and the final interval to infinity drops the exp term.
    double cosphi = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double t0 = grid[g];
        const double la = a.hazard_at(t0);
        const double lb = b.hazard_at(t0);
        const double base = std::sqrt(la * lb * a.survival(t0) * b.survival(t0));
        const double s = la + lb;
        if (g + 1 < grid.size()) {
            const double t1 = grid[g + 1];
            cosphi += base * (2.0 / s) * (1.0 - std::exp(-s * (t1 - t0) / 2.0));
        } else {
            cosphi += base * (2.0 / s);
        }
    }
    cosphi = std::clamp(cosphi, 0.0, 1.0);
    return std::acos(cosphi);
}

}  // namespace clustab
