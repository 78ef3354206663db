#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

#include "phyfid/fields.hpp"
#include "phyfid/io.hpp"

namespace phyfid::heatmap {

using Color = std::array<std::uint8_t, 3>;

/// Blue-white-red map symmetric about zero: -limit is blue, 0 white,
/// +limit red. limit = 0 yields white.
Color diverging(double value, double limit);

/// Hue from flow direction, brightness from magnitude relative to max_mag.
Color flow_color(double u, double v, double max_mag);

io::Rgb8Image render(const ScalarField& field);
io::Rgb8Image render(const FlowField& flow);

/// Writes PNG or PPM with min/max recorded as image text metadata.
void emit_heatmap(const ScalarField& field, const std::filesystem::path& path);
void emit_heatmap(const FlowField& flow, const std::filesystem::path& path);

}  // namespace phyfid::heatmap
