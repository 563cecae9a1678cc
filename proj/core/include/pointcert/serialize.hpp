#pragma once

#include <string>

#include "pointcert/attack.hpp"
#include "pointcert/certify.hpp"
#include "pointcert/transforms.hpp"

namespace pointcert {

/// Parameter encoding, e.g. {"family": "z_twist", "theta": 0.35};
/// general rotation as {"axis": [x, y, z], "angle": r}; linear as a
/// row-major 9-array.
std::string param_to_json(const TransformParam& param);
TransformParam param_from_json(const std::string& text);

/// Certificate record: {"id", "label", "certified", "protocol", "region",
/// "margin", "pA_lower", "alpha", "n_samples", "grid_points", "seed"}.
std::string certificate_to_json(const Certificate& cert);

/// Attack record mirroring the certificate schema.
std::string attack_report_to_json(const AttackReport& report);

} // namespace pointcert
