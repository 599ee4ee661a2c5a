#include "semsar/label_map.hpp"

#include <algorithm>
#include <string>

namespace semsar {

std::string_view to_string(Label l) {
    switch (l) {
    case Label::Shadow: return "shadow";
    case Label::Background: return "background";
    case Label::Target: return "target";
    }
    return "unknown";
}

LabelMap::LabelMap(std::size_t rows, std::size_t cols, Label fill)
    : rows_(rows), cols_(cols), labels_(rows * cols, static_cast<std::uint8_t>(fill)) {
    if (rows == 0 || cols == 0) throw InvalidInput("label map dimensions must be positive");
}

LabelMap::LabelMap(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> raw)
    : rows_(rows), cols_(cols), labels_(std::move(raw)) {
    if (rows == 0 || cols == 0) throw InvalidInput("label map dimensions must be positive");
    if (labels_.size() != rows * cols) throw InvalidInput("label map data length does not match its shape");
    for (auto v : labels_)
        if (v > 2) throw InvalidInput("label value " + std::to_string(v) + " out of range");
}

std::size_t LabelMap::count(Label l) const noexcept {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), static_cast<std::uint8_t>(l)));
}

std::size_t count_changed(const LabelMap& a, const LabelMap& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidInput("count_changed: shape mismatch");
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += a.raw()[i] != b.raw()[i];
    return n;
}

} // namespace semsar
