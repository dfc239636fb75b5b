// Renderers for analysis reports: a human-readable text form and a stable
// machine form (JSON with a fixed key order, byte deterministic for equal
// reports; exact values appear as decimal strings, non-finite lengths as the
// string "infinite").
#pragma once

#include <string>

#include "congmod/engine.hpp"

namespace congmod {

std::string render_text(const AnalysisReport& rep);
std::string render_machine(const AnalysisReport& rep);

}  // namespace congmod
