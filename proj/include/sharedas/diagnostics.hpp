#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sharedas {

enum class WarningKind {
  kDegenerateSpectrum,
  kZeroColumn,
  kFewSamples,
  kNearConstantOutput,
};

std::string_view to_string(WarningKind kind);

struct Warning {
  WarningKind kind;
  std::string detail;
};

using Warnings = std::vector<Warning>;

inline bool has_warning(const Warnings& w, WarningKind kind) {
  for (const auto& item : w) {
    if (item.kind == kind) return true;
  }
  return false;
}

}  // namespace sharedas
