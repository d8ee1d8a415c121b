#include "sharedas/diagnostics.hpp"

namespace sharedas {

std::string_view to_string(WarningKind kind) {
  switch (kind) {
    case WarningKind::kDegenerateSpectrum: return "DegenerateSpectrum";
    case WarningKind::kZeroColumn: return "ZeroColumn";
    case WarningKind::kFewSamples: return "FewSamples";
    case WarningKind::kNearConstantOutput: return "NearConstantOutput";
  }
  return "Unknown";
}

}  // namespace sharedas
