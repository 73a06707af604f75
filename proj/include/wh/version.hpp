#pragma once

namespace wh {

inline constexpr const char* kToolName = "wh1k";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

}  // namespace wh
