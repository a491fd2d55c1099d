#pragma once

#include "oracles/lindblad.hpp"

#include "imlambda/system_model.hpp"
#include "imlambda/units.hpp"

namespace testing {

inline constexpr double kDelta64 = -imlambda::kTwoPi * 64e6;

inline oracle::Model oracle_model(const imlambda::DeviceModel& d) {
    return {d.ren.w_ge, d.ren.w_r, d.ren.chi, d.damping.kappa1, d.damping.kappa2, d.damping.gamma, d.bare.gamma_c};
}

} // namespace testing
