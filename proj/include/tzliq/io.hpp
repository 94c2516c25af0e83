#pragma once

#include <cstdint>
#include <string>

#include "tzliq/envelopes.hpp"
#include "tzliq/liquidation.hpp"
#include "tzliq/pathsim.hpp"
#include "tzliq/surface.hpp"
#include "tzliq/verification.hpp"

namespace tzliq {

/// Stamped into every artifact: tool version, canonical config hash, seed.
struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

/// The comment lines every text artifact starts with.
std::string provenance_lines(const Provenance& prov);

/// Surface CSV: provenance comment lines, then header `t,y,u`, row-major by
/// time then space, full decimal precision.
void write_surface_csv(const std::string& path, const ValueSurface& s, const Provenance& prov);

/// Versioned binary surface cache with grid metadata; read_surface_bin
/// rejects unknown magic/version.
void write_surface_bin(const std::string& path, const ValueSurface& s, const Provenance& prov);
ValueSurface read_surface_bin(const std::string& path);

/// Envelope CSV `t,lower,upper` on the given time nodes.
void write_envelopes_csv(const std::string& path, const EnvelopePair& env,
                         const std::vector<double>& t_nodes, const Provenance& prov);

/// Path dump `t,y,dL` plus a separate events CSV `t,mark`.
void write_path_csv(const std::string& path, const ReflectedPath& p, const Provenance& prov);
void write_path_events_csv(const std::string& path, const ReflectedPath& p,
                           const Provenance& prov);

/// Run dump `t,y,x,xi,cost_impact,cost_risk,cost_slippage` (costs
/// cumulative) plus executed blocks `t,mark,rho`.
void write_run_csv(const std::string& path, const LiquidationRun& run, const Provenance& prov);
void write_run_events_csv(const std::string& path, const LiquidationRun& run,
                          const Provenance& prov);

/// JSON report schema (versioned). Round-trips losslessly.
std::string property_report_to_json(const PropertyReport& rep, const Provenance& prov);
PropertyReport property_report_from_json(const std::string& text);

std::string cost_report_to_json(const CostReport& rep);
CostReport cost_report_from_json(const std::string& text);

std::string fk_report_to_json(const FkReport& rep);
FkReport fk_report_from_json(const std::string& text);

std::string dominance_report_to_json(const DominanceReport& rep);
DominanceReport dominance_report_from_json(const std::string& text);

/// CSV summary table of suite verdicts: fixture,suite,statistic,tolerance,verdict.
void write_suite_summary_csv(const std::string& path, const PropertyReport& rep,
                             const Provenance& prov);

}  // namespace tzliq
