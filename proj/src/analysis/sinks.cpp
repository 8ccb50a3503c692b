#include "consicore/sinks.hpp"

#include <algorithm>

namespace consicore {

bool is_vulnerable_function(std::string_view name)
{
    return std::find(kVulnerableFunctions.begin(), kVulnerableFunctions.end(), name) != kVulnerableFunctions.end();
}

} // namespace consicore
