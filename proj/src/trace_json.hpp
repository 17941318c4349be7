#pragma once

#include <json.hpp>

#include "codemark/embedder.hpp"

namespace codemark {

const char* phase_name(StepPhase phase);
nlohmann::json record_json(const StepRecord& record);
nlohmann::json summary_json(const TraceSummary& summary);

}  // namespace codemark
