#pragma once

// Internal nlohmann-based helpers shared by io.cpp and runner.cpp. Not
// installed.

#include <nlohmann/json.hpp>

#include "pointcert/attack.hpp"
#include "pointcert/certify.hpp"
#include "pointcert/transforms.hpp"

namespace pointcert::detail {

nlohmann::json param_json(const TransformParam& param);
TransformParam param_from(const nlohmann::json& j);

nlohmann::json region_json(const Region& region);
Region region_from(const nlohmann::json& j);

nlohmann::json certificate_json(const Certificate& cert);
nlohmann::json attack_report_json(const AttackReport& report);

} // namespace pointcert::detail
