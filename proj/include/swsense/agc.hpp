#pragma once

// Automatic gain control over the step attenuator. Shared by the
// controller (closed loop) and calibration (settled forward model).

#include <span>

#include "swsense/readout.hpp"

namespace swsense {

/// Open-end code window the AGC tries to hold.
struct AgcWindow {
    int low_code = 0;
    int high_code = 0;

    friend bool operator==(const AgcWindow&, const AgcWindow&) = default;
};

/// Default window: top edge 1 dB below the detector's linear ceiling, or
/// the open-end code produced at `engage_power_dbm` with no attenuation if
/// that is lower; 2 dB wide.
AgcWindow default_agc_window(const ChainConfig& cfg, double engage_power_dbm = 0.0);

struct AgcDecision {
    double att_db = 0.0;
    /// Code above the window with the attenuator already at max_db.
    bool overrange = false;
};

/// One-step hill climb toward the window.
AgcDecision agc_policy(int code_oc, double att_db, const AgcWindow& window,
                       const AttenuatorParams& att);

struct AgcSettled {
    double att_db = 0.0;
    TapCodes codes;
    int steps = 0;
    bool overrange = false;
};

/// Iterates readout + policy from 0 dB until the attenuation stops moving.
AgcSettled settle_agc(std::span<const SpectralLine> lines, const ChainConfig& cfg,
                      const AgcWindow& window);

}  // namespace swsense
