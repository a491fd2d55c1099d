#pragma once

#include "imlambda/dressed.hpp"
#include "imlambda/execution.hpp"
#include "imlambda/system_model.hpp"
#include "imlambda/units.hpp"

#include <string>
#include <vector>

namespace imlambda {

// Which upper dressed state acts as the excited level of the Lambda system.
enum class Branch { Upper3 = 2, Upper4 = 3 };

inline int branch_index(Branch b) { return static_cast<int>(b); }
inline int branch_label(Branch b) { return branch_index(b) + 1; }

struct BalancedDrive {
    double P_d_dbm = 0.0;
    double imbalance = 0.0; // (k~_b1 - k~_b2) / kappa1 at the returned power
};

struct MatchOptions {
    double bracket_lo_dbm = -110.0;
    double bracket_hi_dbm = -60.0;
    double bracket_start_dbm = -100.0;
    double power_rtol = 1e-4;       // relative power tolerance of the balance bisection
    double dip_span_db = 6.0;       // outer window half width around P_d0
    double dip_span_kappa = 2.0;    // inner window half width around w~_b1, in units of kappa
    int outer_scan = 25;
    int inner_scan = 41;
    double power_xtol_db = 1e-4;
    double omega_xtol = kTwoPi * 100.0; // rad/s
    int Q = 3;
};

struct MatchPoint {
    double P_d_star = 0.0;     // W
    double P_d_star_dbm = 0.0;
    double omega_p_star = 0.0; // rad/s
    double r_min = 0.0;
    Branch branch = Branch::Upper4;
    double P_d0_dbm = 0.0;
    bool widened = false; // the first search hit a window boundary
};

/// Power where k~_b1 = k~_b2 for the chosen branch, by bisection in dB.
/// Throws DomainError outside the nesting regime and NotMatchableError without a sign change.
BalancedDrive find_balanced_drive(const DeviceModel& device, double delta_wd, Branch branch,
                                  const MatchOptions& options = {});

/// Drive power and probe frequency minimizing |r| for one branch.
MatchPoint find_dip(const DeviceModel& device, double delta_wd, double P_p_watts, Branch branch,
                    const MatchOptions& options = {});

struct LevelPoint {
    double delta_wd = 0.0;
    bool ok = false;
    std::string error;
    MatchPoint match;
    double w31 = 0.0, w42 = 0.0, w32 = 0.0; // lab frame, rad/s
};

/// Branch-4 dip at each detuning, then lab-frame w~31, w~42, w~32 at the matched drive.
/// Failures are recorded per point.
std::vector<LevelPoint> level_diagram_sweep(const DeviceModel& device, const std::vector<double>& delta_wd,
                                            double P_p_watts, const MatchOptions& options = {},
                                            Execution execution = Execution::Parallel);

} // namespace imlambda
