#pragma once

namespace ffq {

// Bumped whenever a change can alter numerical output; folded into
// result-table fingerprints so stale tables are detectable.
inline constexpr const char* code_version = "1.0.0";

}  // namespace ffq
