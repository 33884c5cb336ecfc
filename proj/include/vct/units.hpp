#pragma once

namespace vct {

// glucose molar mass 180.16 g/mol
inline constexpr double kMmolPerGramCarb = 1000.0 / 180.16; // 5.5506...
inline constexpr double kMgPerDlPerMmolPerL = 18.016;

// insulin dose units
inline constexpr double kMilliunitsPerUnit = 1000.0; // model A infusion unit
inline constexpr double kPmolPerUnit = 6000.0;       // model B infusion unit

inline double mmol_per_l_to_mg_per_dl(double g) { return g * kMgPerDlPerMmolPerL; }
inline double mg_per_dl_to_mmol_per_l(double g) { return g / kMgPerDlPerMmolPerL; }

// U/h -> model infusion units per minute
inline double units_per_hour_to_mU_per_min(double u) { return u * kMilliunitsPerUnit / 60.0; }
inline double units_per_hour_to_pmol_per_min(double u) { return u * kPmolPerUnit / 60.0; }
inline double mU_per_min_to_units_per_hour(double u) { return u * 60.0 / kMilliunitsPerUnit; }
inline double pmol_per_min_to_units_per_hour(double u) { return u * 60.0 / kPmolPerUnit; }

inline double grams_to_mmol(double g) { return g * kMmolPerGramCarb; }
inline double grams_to_mg(double g) { return g * 1000.0; }

} // namespace vct
