#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "semsar/grid.hpp"

namespace semsar {

enum class Label : std::uint8_t { Shadow = 0, Background = 1, Target = 2 };

inline constexpr std::array<Label, 3> kAllLabels{Label::Shadow, Label::Background, Label::Target};

constexpr std::size_t index(Label l) noexcept { return static_cast<std::size_t>(l); }

std::string_view to_string(Label l);

/// One semantic label per pixel.
class LabelMap {
public:
    LabelMap() = default;
    LabelMap(std::size_t rows, std::size_t cols, Label fill = Label::Background);
    LabelMap(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> raw);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return labels_.size(); }
    bool empty() const noexcept { return labels_.empty(); }

    Label operator()(std::size_t r, std::size_t c) const { return static_cast<Label>(labels_[r * cols_ + c]); }
    Label operator[](std::size_t i) const { return static_cast<Label>(labels_[i]); }
    void set(std::size_t r, std::size_t c, Label l) { labels_[r * cols_ + c] = static_cast<std::uint8_t>(l); }
    void set(std::size_t i, Label l) { labels_[i] = static_cast<std::uint8_t>(l); }

    std::span<const std::uint8_t> raw() const noexcept { return labels_; }

    std::size_t count(Label l) const noexcept;

    template <class U, class Tag>
    bool same_shape(const Grid<U, Tag>& g) const noexcept {
        return rows_ == g.rows() && cols_ == g.cols();
    }

    friend bool operator==(const LabelMap&, const LabelMap&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> labels_;
};

/// Number of cells whose labels differ.
std::size_t count_changed(const LabelMap& a, const LabelMap& b);

} // namespace semsar
