#pragma once

#include <string>

#include "json.hpp"
#include "phasenet/energy.hpp"
#include "phasenet/grid.hpp"
#include "phasenet/optimize.hpp"

namespace phasenet {

/// 8-bit binary PGM, rows written top to bottom. Values map linearly from
/// [lo, hi] onto [0, 255] with clamping.
void write_pgm(const ScalarField& field, double lo, double hi,
               const std::string& path);

nlohmann::json to_json(const EnergyBreakdown& e);
nlohmann::json to_json(const OuterRecord& r);
nlohmann::json to_json(const LevelSummary& s);

/// One JSON object per outer record.
void write_runlog(const RunLog& log, const std::string& path);

void write_json(const nlohmann::json& j, const std::string& path);

}  // namespace phasenet
