#pragma once

#include <filesystem>

#include "semsar/grid.hpp"
#include "semsar/label_map.hpp"
#include "semsar/model.hpp"

// Binary containers. All integers and floats are little-endian.
//
//   CIMG0001 / CSPC0001  magic[8] u32 rows, u32 cols, rows*cols x (f64 re, f64 im)
//   LMAP0001             magic[8] u32 rows, u32 cols, rows*cols x u8 (0 shadow, 1 background, 2 target)
//   MASK0001             magic[8] u32 rows, u32 cols, u8 kind, f64 eta, eta_c, eta_r,
//                        ceil(rows*cols/8) bytes of row-major keep bits, LSB first
//   CVEC0001             magic[8] u64 count, count x (f64 re, f64 im), then a MASK0001 block

namespace semsar::io {

namespace fs = std::filesystem;

void write_image(const fs::path& path, const ComplexImage& img);
ComplexImage read_image(const fs::path& path);

void write_spectrum(const fs::path& path, const PhaseHistory& ph);
PhaseHistory read_spectrum(const fs::path& path);

void write_labels(const fs::path& path, const LabelMap& y);
LabelMap read_labels(const fs::path& path);

void write_mask(const fs::path& path, const SamplingMask& mask);
MaskPtr read_mask(const fs::path& path);

void write_measurement(const fs::path& path, const MeasurementVector& m);
MeasurementVector read_measurement(const fs::path& path);

enum class PgmScale { Linear, Decibel };

struct PgmOptions {
    PgmScale scale = PgmScale::Decibel;
    double dynamic_range_db = 40.0;
    int bits = 8; // 8 or 16
};

/// Magnitude image; the brightest pixel maps to the top grey level.
void write_pgm(const fs::path& path, const ComplexImage& img, const PgmOptions& opt = {});
/// Shadow 0, background 128, target 255.
void write_label_pgm(const fs::path& path, const LabelMap& y);

} // namespace semsar::io
