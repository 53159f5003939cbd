#pragma once

#include <string>

#include "esnrls/esn_agent.hpp"
#include "esnrls/fnn_agent.hpp"

namespace esnrls {

// Agents serialize themselves through Agent::snapshot_json(); these rebuild
// them from that text. Matrices are stored row-major with explicit dims, so
// a snapshot pins a run's exact parameters independent of seeds.

EsnAgent esn_agent_from_snapshot(const std::string& json_text);
FnnAgent fnn_agent_from_snapshot(const std::string& json_text);

}  // namespace esnrls
