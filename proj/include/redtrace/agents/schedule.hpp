#pragma once

// Exploration-rate schedules. Two attacker-profile piecewise forms (a
// fast-win profile that starts exploiting and ramps exploration up, and a
// reconnaissance-heavy profile that starts broad and decays), plus the two
// experimental variants: an additive per-step ramp and a multiplicative
// per-step decay. Beyond the configured horizon the piecewise forms hold
// their end value.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "redtrace/core.hpp"

namespace redtrace::agents {

struct ExplorationSchedule {
    enum class Kind { EarlyExploitPiecewise, StandardPiecewise, AdditiveRamp, MultiplicativeDecay };

    Kind kind = Kind::StandardPiecewise;
    double eps_low = 0.1;
    double eps_high = 0.9;
    std::int64_t t_switch = 0;     // T_exploit / T_explore
    std::int64_t t_total = 5000;   // T
    double eps_start = 0.9;
    double increment = 0.005;
    double eps_cap = 0.9;
    double factor = 0.95;
    double eps_floor = 0.01;

    static ExplorationSchedule early_exploit(double lo, double hi, std::int64_t t_exploit,
                                             std::int64_t t_total) {
        ExplorationSchedule s;
        s.kind = Kind::EarlyExploitPiecewise;
        s.eps_low = lo;
        s.eps_high = hi;
        s.t_switch = t_exploit;
        s.t_total = t_total;
        s.check_piecewise();
        return s;
    }
    static ExplorationSchedule standard(double lo, double hi, std::int64_t t_explore,
                                        std::int64_t t_total) {
        ExplorationSchedule s;
        s.kind = Kind::StandardPiecewise;
        s.eps_low = lo;
        s.eps_high = hi;
        s.t_switch = t_explore;
        s.t_total = t_total;
        s.check_piecewise();
        return s;
    }
    static ExplorationSchedule additive(double start, double increment, double cap) {
        ExplorationSchedule s;
        s.kind = Kind::AdditiveRamp;
        s.eps_start = start;
        s.increment = increment;
        s.eps_cap = cap;
        check_rate(start);
        check_rate(cap);
        return s;
    }
    static ExplorationSchedule multiplicative(double start, double factor, double floor) {
        ExplorationSchedule s;
        s.kind = Kind::MultiplicativeDecay;
        s.eps_start = start;
        s.factor = factor;
        s.eps_floor = floor;
        check_rate(start);
        check_rate(floor);
        return s;
    }

    std::string kind_name() const {
        switch (kind) {
            case Kind::EarlyExploitPiecewise: return "early";
            case Kind::StandardPiecewise: return "standard";
            case Kind::AdditiveRamp: return "additive";
            case Kind::MultiplicativeDecay: return "multiplicative";
        }
        return "?";
    }

private:
    static void check_rate(double e) {
        if (e < 0.0 || e > 1.0) throw InvalidArgument("exploration rate outside [0,1]");
    }
    void check_piecewise() const {
        check_rate(eps_low);
        check_rate(eps_high);
        if (t_switch >= t_total)
            throw InvalidArgument("piecewise schedule requires switch step < total steps");
    }
};

inline double epsilon_at(const ExplorationSchedule& s, std::int64_t t) {
    if (t < 0) throw InvalidArgument("epsilon_at: negative step");
    switch (s.kind) {
        case ExplorationSchedule::Kind::EarlyExploitPiecewise: {
            if (t <= s.t_switch) return s.eps_low;
            if (t >= s.t_total) return s.eps_high;
            return s.eps_low + (s.eps_high - s.eps_low) * static_cast<double>(t - s.t_switch) /
                                   static_cast<double>(s.t_total - s.t_switch);
        }
        case ExplorationSchedule::Kind::StandardPiecewise: {
            if (t <= s.t_switch) return s.eps_high;
            if (t >= s.t_total) return s.eps_low;
            return s.eps_high - (s.eps_high - s.eps_low) * static_cast<double>(t - s.t_switch) /
                                    static_cast<double>(s.t_total - s.t_switch);
        }
        case ExplorationSchedule::Kind::AdditiveRamp:
            return std::min(s.eps_start + s.increment * static_cast<double>(t), s.eps_cap);
        case ExplorationSchedule::Kind::MultiplicativeDecay:
            return std::max(s.eps_start * std::pow(s.factor, static_cast<double>(t)), s.eps_floor);
    }
    return 0.0;
}

}  // namespace redtrace::agents
