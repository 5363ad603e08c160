#pragma once

#include <utility>
#include <vector>

namespace swsense {

/// Piecewise-linear function of frequency. Values outside the sampled span
/// are held at the end points; band checks are the caller's job.
class FrequencyTable {
public:
    FrequencyTable() = default;
    /// Single-entry table: constant everywhere.
    explicit FrequencyTable(double constant);
    /// Points must have strictly increasing frequency.
    explicit FrequencyTable(std::vector<std::pair<double, double>> points);

    [[nodiscard]] double at(double freq_hz) const;
    [[nodiscard]] bool empty() const { return points_.empty(); }
    [[nodiscard]] const std::vector<std::pair<double, double>>& points() const { return points_; }
    [[nodiscard]] double min_value() const;
    [[nodiscard]] double max_value() const;

    friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;

private:
    std::vector<std::pair<double, double>> points_;
};

}  // namespace swsense
