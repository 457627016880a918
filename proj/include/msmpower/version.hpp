#pragma once

namespace msmpower {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace msmpower
