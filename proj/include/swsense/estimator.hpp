#pragma once

// Calibration look-up table, inversion of tap codes into (frequency, power)
// estimates with l1/l2 switching, and the ADC-limited resolution analysis
// used to place the sensing nodes.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "swsense/agc.hpp"
#include "swsense/readout.hpp"
#include "swsense/units.hpp"

namespace swsense {

struct GridSpec {
    double f_start = 1e9;
    double f_stop = 16e9;
    double f_step = 0.1e9;
    double p_start = -20.0;
    double p_stop = 20.0;
    double p_step = 1.0;

    [[nodiscard]] std::vector<double> freqs() const;
    [[nodiscard]] std::vector<double> powers() const;
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct CalibrationCell {
    double att_db = 0.0;
    int code_oc = 0;
    int code_l1 = 0;
    int code_l2 = 0;

    friend bool operator==(const CalibrationCell&, const CalibrationCell&) = default;
};

enum class TapId { l1, l2 };
enum class Confidence { in_range, clamped, saturated };

std::string_view to_string(TapId t);
std::string_view to_string(Confidence c);

class CalibrationTable {
public:
    CalibrationTable() = default;
    /// `cells` is frequency-major: cells[i_f * powers.size() + i_p].
    CalibrationTable(std::vector<double> freq_grid, std::vector<double> power_grid,
                     std::vector<CalibrationCell> cells, std::array<double, 3> d_const,
                     std::string config_hash, ChainConfig chain, AgcWindow agc);

    [[nodiscard]] const std::vector<double>& freq_grid() const { return freq_grid_; }
    [[nodiscard]] const std::vector<double>& power_grid() const { return power_grid_; }
    [[nodiscard]] const std::vector<CalibrationCell>& cells() const { return cells_; }
    [[nodiscard]] const CalibrationCell& cell(std::size_t i_f, std::size_t i_p) const;
    /// Detector voltage for unit standing-wave ratio at the reference drive,
    /// per tap in the order (open end, l1, l2).
    [[nodiscard]] const std::array<double, 3>& d_const() const { return d_const_; }
    [[nodiscard]] const std::string& config_hash() const { return config_hash_; }
    [[nodiscard]] const ChainConfig& chain() const { return chain_; }
    [[nodiscard]] const AgcWindow& agc_window() const { return agc_; }

    /// Stub-referred level (input power minus attenuation) for an open-end
    /// code, interpolated along the calibration column(s) around freq_hz.
    [[nodiscard]] double stub_referred_level(int code_oc, double freq_hz) const;

    /// Tap-minus-open-end code difference along column i_f for the cell whose
    /// stub-referred level is closest to `level`.
    [[nodiscard]] int tap_delta(std::size_t i_f, TapId tap, double level) const;

private:
    struct LevelPoint {
        double level;
        int code_oc;
        std::size_t i_p;
    };
    void build_index();
    [[nodiscard]] double column_level(std::size_t i_f, int code_oc) const;

    std::vector<double> freq_grid_;
    std::vector<double> power_grid_;
    std::vector<CalibrationCell> cells_;
    std::array<double, 3> d_const_{};
    std::string config_hash_;
    ChainConfig chain_;
    AgcWindow agc_;
    std::vector<std::vector<LevelPoint>> columns_;
};

/// Forward-simulates every CW grid point with the attenuator settled by the
/// AGC policy. Throws CalibrationRangeError for points the detector cannot
/// represent.
CalibrationTable build_calibration(const ChainConfig& cfg, const GridSpec& grid,
                                   const AgcWindow& window);
CalibrationTable build_calibration(const ChainConfig& cfg, const GridSpec& grid = {});

struct FrequencyEstimate {
    Frequency freq;
    TapId tap_used = TapId::l1;
    Confidence confidence = Confidence::in_range;
};

struct Estimate {
    Frequency freq;
    PowerLevel power;
    TapId tap_used = TapId::l1;
    Confidence confidence = Confidence::in_range;
};

/// Closed-form inversion of one tap against the open end; returns the raw
/// frequency in Hz (0 when the ratio clamps at 1).
double closed_form_frequency(int code_tap, int code_oc, TapId tap, const CalibrationTable& cal,
                             const ChainConfig& cfg, bool* clamped = nullptr);

FrequencyEstimate estimate_frequency(const TapCodes& codes, const CalibrationTable& cal,
                                     const ChainConfig& cfg);
PowerLevel estimate_power(const TapCodes& codes, Frequency freq, const CalibrationTable& cal);

/// Frequency then power, with the worst confidence of the two.
Estimate estimate(const TapCodes& codes, const CalibrationTable& cal);

/// ADC-limited frequency step at f for a tap with the given f_max.
double resolution(Frequency f, Frequency f_max, const DetectorParams& det, const AdcParams& adc);

struct NodePlacement {
    Frequency f_max_2;
    Frequency f_min;
};

/// Places the second node where the first node's relative resolution
/// reaches max_pct, then finds where the second node's does the same.
/// max_pct is a fraction (0.0025 for 0.25 %).
NodePlacement place_nodes(Frequency f_max_1, double max_pct, const DetectorParams& det,
                          const AdcParams& adc);

}  // namespace swsense
