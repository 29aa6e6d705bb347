#pragma once

// Total carbon = (software energy + overhead energy) * intensity + embodied,
// and its per-functional-unit score.

#include <cmath>
#include <string>

#include "carbondef/errors.hpp"
#include "carbondef/grid_integration.hpp"
#include "carbondef/number_format.hpp"

namespace carbondef {

inline double total_carbon(double operational_kg, double embodied_kg) {
    if (!(operational_kg >= 0.0) || !(embodied_kg >= 0.0))
        throw NegativeInput("emissions must be >= 0");
    return operational_kg + embodied_kg;
}

inline double sci(double total_kg, double functional_units) {
    if (!(functional_units > 0.0))
        throw ZeroFunctionalUnits("functional unit count must be > 0, got " +
                                  format_number(functional_units));
    return total_kg / functional_units;
}

/// Energy drawn by the software itself and the facility overhead on top.
struct OverheadSplit {
    double software_joules = 0.0;
    double overhead_joules = 0.0;
};

/// Splits the PUE-scaled energy of `report`. Server idle energy stays on
/// the software side; overhead is whatever PUE adds.
inline OverheadSplit overhead_split(const EmissionsReport& report) {
    double software = report.input_joules;
    double scaled = apply_pue(software, PueFactor(report.pue));
    return {software, scaled - software};
}

struct CarbonTotals {
    double operational_kg = 0.0;
    double embodied_kg = 0.0;
    double total_kg = 0.0;
    std::string functional_unit_name;
    double functional_unit_count = 1.0;
    double sci_kg_per_unit = 0.0;
};

inline CarbonTotals compose_totals(double operational_kg, double embodied_kg,
                                   std::string unit_name, double unit_count) {
    CarbonTotals t;
    t.operational_kg = operational_kg;
    t.embodied_kg = embodied_kg;
    t.total_kg = total_carbon(operational_kg, embodied_kg);
    t.functional_unit_name = std::move(unit_name);
    t.functional_unit_count = unit_count;
    t.sci_kg_per_unit = sci(t.total_kg, unit_count);
    return t;
}

}  // namespace carbondef
