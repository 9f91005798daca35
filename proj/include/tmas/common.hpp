#pragma once

#include <set>
#include <string>

namespace tmas {

using PropSet = std::set<std::string>;

inline constexpr double kGeoEps = 1e-9;

std::string format_props(const PropSet& props);

/// Inverse of format_props: "{a,b}" or "{}".
PropSet parse_props(const std::string& text);

}  // namespace tmas
