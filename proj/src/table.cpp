#include "swsense/table.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swsense {

FrequencyTable::FrequencyTable(double constant) : points_{{0.0, constant}} {}

FrequencyTable::FrequencyTable(std::vector<std::pair<double, double>> points)
    : points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i].first) || !std::isfinite(points_[i].second)) {
            throw std::invalid_argument("frequency table entries must be finite");
        }
        if (i > 0 && !(points_[i].first > points_[i - 1].first)) {
            throw std::invalid_argument("frequency table must be strictly increasing in frequency");
        }
    }
}

double FrequencyTable::at(double freq_hz) const {
    if (points_.empty()) throw std::logic_error("empty frequency table");
    if (points_.size() == 1 || freq_hz <= points_.front().first) return points_.front().second;
    if (freq_hz >= points_.back().first) return points_.back().second;
    auto hi = std::upper_bound(points_.begin(), points_.end(), freq_hz,
                               [](double f, const auto& p) { return f < p.first; });
    auto lo = hi - 1;
    const double w = (freq_hz - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
}

double FrequencyTable::min_value() const {
    if (points_.empty()) throw std::logic_error("empty frequency table");
    return std::min_element(points_.begin(), points_.end(),
                            [](const auto& a, const auto& b) { return a.second < b.second; })
        ->second;
}

double FrequencyTable::max_value() const {
    if (points_.empty()) throw std::logic_error("empty frequency table");
    return std::max_element(points_.begin(), points_.end(),
                            [](const auto& a, const auto& b) { return a.second < b.second; })
        ->second;
}

}  // namespace swsense
