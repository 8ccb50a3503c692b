#pragma once

#include <array>
#include <string_view>

namespace consicore {

/// Database functions through which SQL injection is possible.
inline constexpr std::array<std::string_view, 8> kVulnerableFunctions = {"query", "queryWithFactory", "rawQuery",
    "rawQueryWithFactory", "update", "updateWithOnConflict", "delete", "execSQL"};

bool is_vulnerable_function(std::string_view name);

} // namespace consicore
