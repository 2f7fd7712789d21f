#pragma once

#include <iosfwd>
#include <string>

#include "nicholson/integrator.hpp"
#include "nicholson/model.hpp"
#include "nicholson/persistence.hpp"
#include "nicholson/robustness.hpp"

namespace nicholson {

/**
 * System definition files are JSON, one document per system:
 *
 *   {
 *     "n": 2,
 *     "delays": [1.0, 1.0],
 *     "nonlinearity": "nicholson" | "linear" | {"mackey_glass": 1.5},
 *     "d":    [signal, signal],
 *     "beta": [signal, signal],
 *     "c":    [signal, signal],            // optional, defaults to 1
 *     "a":    [[signal, signal], [signal, signal]]
 *   }
 *
 * where a signal is either a plain number (constant) or
 *   {"constant": 0.5, "terms": [{"kind": "sine", "amplitude": 0.25,
 *                                "frequency": 1.0, "phase": 0.0}]}.
 *
 * Parsing is strict: unknown keys and dimension mismatches are rejected.
 */
DelaySystem parse_system(const std::string& json_text);
DelaySystem load_system(const std::string& path);
std::string system_to_json(const DelaySystem& sys);

std::string verdict_to_json(const PersistenceVerdict& verdict);
PersistenceVerdict verdict_from_json(const std::string& json_text);

std::string structure_to_json(const BlockStructure& structure);
BlockStructure structure_from_json(const std::string& json_text);

/// CSV with header "t,y_1,...,y_n", knot values only, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// CSV with header "block,value,status,dispersion,T,renorm_count".
void write_exponents_csv(std::ostream& os, const std::map<int, LyapunovEstimate>& exponents);

/// CSV with header "block,window,slope": plot-ready finite-window estimates.
void write_window_slopes_csv(std::ostream& os, const std::map<int, LyapunovEstimate>& exponents);

/// CSV with header "shift,minF_secondhalf,recurrent".
void write_translates_csv(std::ostream& os, const std::vector<TranslateResult>& translates);

/// CSV with header "t,F" for the base growth profile.
void write_profile_csv(std::ostream& os, const std::vector<scalar_t>& t,
                       const std::vector<scalar_t>& F);

/// Fixed 17-significant-digit formatting used by every CSV writer.
std::string format_number(scalar_t v);

/// Human-readable reports.
void print_validation(std::ostream& os, const ValidationReport& report);
void print_structure(std::ostream& os, const BlockStructure& structure);
void print_exponents(std::ostream& os, const std::map<int, LyapunovEstimate>& exponents);
void print_verdict(std::ostream& os, const PersistenceVerdict& verdict);
void print_empirical(std::ostream& os, const EmpiricalReport& report);
void print_hull_demo(std::ostream& os, const HullDemoReport& report);
void print_scalar_criterion(std::ostream& os, const ScalarCriterionReport& report);

}  // namespace nicholson
